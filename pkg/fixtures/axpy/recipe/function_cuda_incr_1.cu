//_connector:function
//_param:a = a
//_param:x_i = x[i]
//_param:y_i = y[i]
__global__ void axpy(int n, float a, const float *x, float *y) {
  const int t = blockDim.x * blockIdx.x + threadIdx.x;
  const int T = gridDim.x * blockDim.x;
  const int i_lo = (int)(((long long)n * t) / T);
  const int i_hi = (int)(((long long)n * (t + 1)) / T);
  for (int i = i_lo; i < i_hi; i++) {
    //_link:kernel
  }
}
