const int N = 1024;

void strided_copy(int src[N], int dst[N])
{
    int i;
    for (i = 0; i < N; i += 4)
        dst[i] = src[i];
}
