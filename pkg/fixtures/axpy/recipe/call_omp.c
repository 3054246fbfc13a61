//_connector:execute
#pragma omp parallel
axpy(${N}, ${a}, ${x}, ${y});
