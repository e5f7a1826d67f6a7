const int H = 64;
const int W = 64;

void rgb_split(int rgb[H][W][3], int r[H][W], int g[H][W], int b[H][W])
{
    int y;
    int x;
    for (y = 0; y < H; y++)
        for (x = 0; x < W; x++)
        {
            r[y][x] = rgb[y][x][0];
            g[y][x] = rgb[y][x][1];
            b[y][x] = rgb[y][x][2];
        }
}
