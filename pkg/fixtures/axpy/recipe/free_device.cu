//_connector:clean
cudaFree(d_x);
cudaFree(d_y);
