const int N = 4096;

void threshold(int img[N], int out[N], int level)
{
    int i;
#pragma stml iteration_independent
    for (i = 0; i < N; i++)
    {
        if (img[i] > level)
            out[i] = 255;
        else
            out[i] = 0;
    }
}
