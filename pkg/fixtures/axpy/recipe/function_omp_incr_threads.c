//_connector:function
//_param:a = a
//_param:x_i = x[i]
//_param:y_i = y[i]
void axpy(int n, float a, const float *x, float *y) {
  const int t = omp_get_thread_num();
  const int T = omp_get_num_threads();
  for (int i = t; i < n; i += T) {
    //_link:kernel
  }
}
