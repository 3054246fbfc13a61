//_connector:function
//_param:a = a
//_param:x_i = x[i]
//_param:y_i = y[i]
__global__ void axpy(int n, float a, const float *x, float *y) {
  const int i = blockDim.x * blockIdx.x + threadIdx.x;
  if (i < n) {
    //_link:kernel
  }
}
