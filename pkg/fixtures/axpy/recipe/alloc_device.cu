//_connector:setup
cudaMalloc((void **)&d_x, ${N} * sizeof(float));
cudaMalloc((void **)&d_y, ${N} * sizeof(float));
