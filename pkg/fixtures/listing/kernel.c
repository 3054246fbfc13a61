/* file `kernel.c` */
//_connector:kernel
${y_i} += ${a} * ${x_i};
