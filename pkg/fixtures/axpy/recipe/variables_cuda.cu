//_connector:variables
int n_threads = 1;
double t_start, t_stop;
int threads_per_block, n_blocks;
float *d_x, *d_y;
