const int N = 1024;

void vector_add(int a[N], int b[N], int c[N])
{
    int i;
#pragma stml iteration_independent
    for (i = 0; i < N; i++)
        c[i] = a[i] + b[i];
}
