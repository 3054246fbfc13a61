//_connector:include
#include <omp.h>
