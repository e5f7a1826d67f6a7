// 2D convolution: three 2-D arrays and a four-deep loop nest.
const int H = 16;
const int W = 16;
const int K = 3;
const int OH = 14;
const int OW = 14;

void convolution(int input_image[H][W], int kernel[K][K], int output_image[OH][OW])
{
    int i;
    int j;
    int ki;
    int kj;
    for (i = 0; i < OH; i++)
        for (j = 0; j < OW; j++)
        {
            output_image[i][j] = 0;
            for (ki = 0; ki < K; ki++)
                for (kj = 0; kj < K; kj++)
                    output_image[i][j] += input_image[i + ki][j + kj] * kernel[ki][kj];
        }
}
