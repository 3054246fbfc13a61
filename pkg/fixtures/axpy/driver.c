/* AXPY driver shared by every variant */
//_connector:driver
//_param:N = length
//_param:a = 1.0f
//_param:x = h_x
//_param:y = h_y
//_param:k = 2
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <time.h>
//_link:include

static double wall_time(void) {
  struct timespec ts;
  clock_gettime(CLOCK_MONOTONIC, &ts);
  return (double)ts.tv_sec + 1.0e-9 * (double)ts.tv_nsec;
}

//_link:function

int main(int argc, char *argv[]) {
  const int ${N} = (argc > 1) ? atoi(argv[1]) : (1 << 24);
  //_link:variables

  float *${x} = (float *)malloc(${N} * sizeof(float));
  float *${y} = (float *)malloc(${N} * sizeof(float));
  for (int i = 0; i < ${N}; i++) {
    ${x}[i] = 1.0f;
    ${y}[i] = 2.0f;
  }
  //_link:setup
  //_link:execute

  const float expected = 2.0f + (${k} + 1) * ${a};
  float max_error = 0.0f;
  for (int i = 0; i < ${N}; i++) {
    max_error = fmaxf(max_error, fabsf(${y}[i] - expected));
  }
  printf("max error: %e\n", max_error);
  //_link:clean

  free(${x});
  free(${y});
  return 0;
}
