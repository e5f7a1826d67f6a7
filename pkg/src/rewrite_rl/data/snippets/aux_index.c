const int N = 128;

void gather(int v[N], int w[N], int i)
{
    int j;
    int aux;
    aux = 0;
    for (j = 0; j < N; j++)
    {
        w[i] = v[aux];
        aux++;
    }
}
