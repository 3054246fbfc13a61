/* AXPY level-1 template: OpenMP, increment by 1 */
//_connector:include
#include <omp.h>
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
//_connector:variables
int n_threads = 1;
double t_start, t_stop;
//_connector:setup
#pragma omp parallel
{
  #pragma omp single
  n_threads = omp_get_num_threads();
}
//_connector:execute
#pragma omp parallel
axpy(${N}, ${a}, ${x}, ${y});
t_start = wall_time();
for (int rep = 0; rep < ${k}; rep++) {
  #pragma omp parallel
  axpy(${N}, ${a}, ${x}, ${y});
}
t_stop = wall_time();
printf("threads: %d, time per call: %e s\n", n_threads, (t_stop - t_start) / ${k});
//_connector:clean
