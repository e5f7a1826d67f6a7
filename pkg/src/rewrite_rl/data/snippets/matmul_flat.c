const int N = 32;

void matmul(int a[1024], int b[1024], int c[1024])
{
    int i;
    int j;
    int k;
#pragma stml iteration_independent
    for (i = 0; i < N; i++)
        for (j = 0; j < N; j++)
        {
            c[i * 32 + j] = 0;
            for (k = 0; k < N; k++)
                c[i * 32 + j] += a[i * 32 + k] * b[k * 32 + j];
        }
}
