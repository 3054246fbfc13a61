//_connector:function
//_param:a = a
//_param:x_i = x[i]
//_param:y_i = y[i]
void axpy(int n, float a, const float *x, float *y) {
  const int t = omp_get_thread_num();
  const int T = omp_get_num_threads();
  const int i_lo = (int)(((long long)n * t) / T);
  const int i_hi = (int)(((long long)n * (t + 1)) / T);
  for (int i = i_lo; i < i_hi; i++) {
    //_link:kernel
  }
}
