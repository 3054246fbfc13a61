/* AXPY level-1 template: CUDA, increment by #threads */
//_connector:include
#include <cuda_runtime.h>
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
//_connector:variables
int n_threads = 1;
double t_start, t_stop;
int threads_per_block, n_blocks;
float *d_x, *d_y;
//_connector:setup
threads_per_block = 256;
n_blocks = 80;
n_threads = n_blocks * threads_per_block;
cudaMalloc((void **)&d_x, ${N} * sizeof(float));
cudaMalloc((void **)&d_y, ${N} * sizeof(float));
//_connector:execute
cudaMemcpy(d_x, ${x}, ${N} * sizeof(float), cudaMemcpyHostToDevice);
cudaMemcpy(d_y, ${y}, ${N} * sizeof(float), cudaMemcpyHostToDevice);
axpy<<<n_blocks, threads_per_block>>>(${N}, ${a}, d_x, d_y);
cudaDeviceSynchronize();
t_start = wall_time();
for (int rep = 0; rep < ${k}; rep++) {
  axpy<<<n_blocks, threads_per_block>>>(${N}, ${a}, d_x, d_y);
  cudaDeviceSynchronize();
}
t_stop = wall_time();
cudaMemcpy(${y}, d_y, ${N} * sizeof(float), cudaMemcpyDeviceToHost);
printf("threads: %d, time per call: %e s\n", n_threads, (t_stop - t_start) / ${k});
//_connector:clean
cudaFree(d_x);
cudaFree(d_y);
