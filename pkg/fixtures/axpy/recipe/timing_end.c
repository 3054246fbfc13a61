//_connector:execute
t_stop = wall_time();
