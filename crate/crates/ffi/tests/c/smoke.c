#include <stdio.h>
#include <string.h>

#include "wilson_loops.h"

#define CHECK(x)                                                       \
  do {                                                                 \
    if (!(x)) {                                                        \
      fprintf(stderr, "line %d: %s (%s)\n", __LINE__, #x, wl_last_error()); \
      return 1;                                                        \
    }                                                                  \
  } while (0)

int main(void) {
  WlSolver *solver = NULL;
  WlLoops *loops = NULL;
  WlPoly *poly = NULL;
  char buf[64];
  size_t needed = 0;

  CHECK(wl_solver_new("lex", &solver) == WL_STATUS_OK);
  CHECK(wl_loops_parse("commutator 1", 2, &loops) == WL_STATUS_OK);
  CHECK(wl_solver_polynomial(solver, loops, 4, &poly) == WL_STATUS_OK);
  CHECK(wl_poly_degree(poly) == 4);
  CHECK(wl_poly_coeff(poly, 2, buf, sizeof buf, &needed) == WL_STATUS_OK);
  CHECK(strcmp(buf, "2") == 0);
  wl_poly_free(poly);
  wl_loops_free(loops);

  CHECK(wl_loops_parse("x+ y+", 2, &loops) == WL_STATUS_PARSE);
  CHECK(strlen(wl_last_error()) > 0);
  wl_solver_free(solver);
  puts("ok");
  return 0;
}
