const int N = 1024;

void prefix_sum(int v[N])
{
    int i;
    for (i = 1; i < N; i++)
        v[i] = v[i] + v[i - 1];
}
