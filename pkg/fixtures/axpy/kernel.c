//_connector:kernel
${y_i} += ${a} * ${x_i};
