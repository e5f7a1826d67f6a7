const int N = 512;
int total;

void accumulate(int v[N])
{
    int i;
    for (i = 0; i < N; i++)
        total += v[i];
}
