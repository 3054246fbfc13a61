/* file `function.c` */
//_connector:function
void fp_op(int n, float a, float *x, float *y) {
  for (int i=0; i<n; i++) {
    //_param:a = a
    //_param:x_i = x[i]
    //_param:y_i = y[i]
    //_link:kernel
  }
}
