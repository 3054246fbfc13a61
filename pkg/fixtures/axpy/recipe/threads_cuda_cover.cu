//_connector:setup
threads_per_block = 256;
n_blocks = (${N} + threads_per_block - 1) / threads_per_block;
n_threads = n_blocks * threads_per_block;
