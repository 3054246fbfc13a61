//_connector:setup
threads_per_block = 256;
n_blocks = 80;
n_threads = n_blocks * threads_per_block;
