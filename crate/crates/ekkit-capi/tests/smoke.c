#include <math.h>
#include <stdio.h>
#include <string.h>
#include "ekkit.h"

#define CHECK(c) do { if (!(c)) { fprintf(stderr, "failed: %s (%s)\n", #c, ek_last_error()); return 1; } } while (0)

int main(void) {
    EkLattice *l = NULL;
    EkComplex tau = {0.0, 1.0};
    CHECK(ek_lattice_new(tau, &l) == EK_STATUS_OK);

    EkComplex z = {0.3, 0.2}, w = {0.1, 0.4}, wn = {-0.1, -0.4};
    EkValue e, g;
    CHECK(ek_ek(l, 0, 1, z, w, &e) == EK_STATUS_OK);
    CHECK(ek_g_star(l, 0, 0, z, wn, false, &g) == EK_STATUS_OK);
    CHECK(fabs(e.value.re + g.value.re) < 1e-12 && fabs(e.value.im + g.value.im) < 1e-12);

    CHECK(ek_ek(l, 0, 0, z, w, &e) == EK_STATUS_DOMAIN);
    CHECK(strlen(ek_last_error()) > 0);
    CHECK(ek_g_star(NULL, 0, 0, z, w, false, &g) == EK_STATUS_NULL_POINTER);

    char *json = NULL;
    bool pass = false;
    CHECK(ek_run_check(l, "zeta-id", 1, &json, &pass) == EK_STATUS_OK);
    CHECK(pass && strstr(json, "\"pass\":true") != NULL);
    ek_string_free(json);

    EkReducer *r = NULL;
    char *poly = NULL;
    CHECK(ek_reducer_new(&r) == EK_STATUS_OK);
    CHECK(ek_reduce(r, 0, 1, false, &poly) == EK_STATUS_OK);
    CHECK(strcmp(poly, "1 * G01") == 0);
    ek_string_free(poly);
    ek_reducer_free(r);

    ek_lattice_free(l);
    puts("ok");
    return 0;
}
