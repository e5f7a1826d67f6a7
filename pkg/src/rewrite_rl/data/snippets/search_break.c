const int N = 256;

void find_first(int v[N], int out[1])
{
    int i;
    out[0] = 0 - 1;
    for (i = 0; i < N; i++)
    {
        if (v[i] == 0)
        {
            out[0] = i;
            break;
        }
    }
}
