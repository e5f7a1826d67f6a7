const int N = 16;

void drain(int v[64])
{
    int i;
    int j;
    for (j = 0; j < N; j++)
    {
        for (i = 0; i < size(v); i++)
            update(v[i]);
        clean(v);
    }
}
