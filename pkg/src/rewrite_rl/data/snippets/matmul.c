const int N = 32;

void matmul(int a[N][N], int b[N][N], int c[N][N])
{
    int i;
    int j;
    int k;
    for (i = 0; i < N; i++)
        for (j = 0; j < N; j++)
        {
            c[i][j] = 0;
            for (k = 0; k < N; k++)
                c[i][j] += a[i][k] * b[k][j];
        }
}
