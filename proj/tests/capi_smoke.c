/* The public header must compile as C. */
#include <math.h>
#include <stdio.h>

#include "mcpsim/mcpsim.h"

int main(void) {
  mcpsim_params p = {4.0, 6.0, 8.0, 1};
  double v = 0.0;
  if (mcpsim_lambda_bar(&p, &v) != MCPSIM_OK) {
    fprintf(stderr, "%s\n", mcpsim_last_error());
    return 1;
  }
  if (fabs(v - 0.5 * (96.0 - sqrt(8448.0))) > 1e-12) return 1;
  printf("lambda_bar = %.17g\n", v);
  return 0;
}
