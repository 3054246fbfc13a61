//_connector:variables
int n_threads = 1;
double t_start, t_stop;
