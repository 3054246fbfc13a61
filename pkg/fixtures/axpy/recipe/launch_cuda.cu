//_connector:execute
axpy<<<n_blocks, threads_per_block>>>(${N}, ${a}, d_x, d_y);
cudaDeviceSynchronize();
