//_connector:execute
printf("threads: %d, time per call: %e s\n", n_threads, (t_stop - t_start) / ${k});
