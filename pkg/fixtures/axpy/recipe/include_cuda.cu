//_connector:include
#include <cuda_runtime.h>
