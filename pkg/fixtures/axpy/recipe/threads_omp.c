//_connector:setup
#pragma omp parallel
{
  #pragma omp single
  n_threads = omp_get_num_threads();
}
