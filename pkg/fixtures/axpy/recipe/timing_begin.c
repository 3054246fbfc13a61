//_connector:execute
t_start = wall_time();
for (int rep = 0; rep < ${k}; rep++) {
  //_link:execute
}
