//_connector:execute
cudaMemcpy(${y}, d_y, ${N} * sizeof(float), cudaMemcpyDeviceToHost);
