const int N = 64;
const int M = 16;

void chunked_sum(int v[1024], int w[M])
{
    int i;
    int j;
#pragma stml loop_schedule
    for (j = 0; j < M; j++)
    {
        w[j] = 0;
        for (i = 0; i < N; i++)
            w[j] += v[j * N + i];
    }
}
