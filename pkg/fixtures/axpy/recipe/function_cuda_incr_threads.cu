//_connector:function
//_param:a = a
//_param:x_i = x[i]
//_param:y_i = y[i]
__global__ void axpy(int n, float a, const float *x, float *y) {
  const int t = blockDim.x * blockIdx.x + threadIdx.x;
  const int T = gridDim.x * blockDim.x;
  for (int i = t; i < n; i += T) {
    //_link:kernel
  }
}
