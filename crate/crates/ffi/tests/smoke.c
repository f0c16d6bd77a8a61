#include <stdio.h>
#include <stdlib.h>

#include "unidecon.h"

int main(void) {
    UdKernel *k = NULL;
    UdSample *s = NULL;
    double m2, l2, dl2;
    double curve[5];

    if (ud_kernel_new("biweight", &k) != UD_STATUS_OK) return 1;
    if (ud_kernel_functionals(k, &m2, &l2, &dl2) != UD_STATUS_OK) return 1;
    printf("m2=%.12f l2=%.12f dl2=%.12f\n", m2, l2, dl2);

    if (ud_sample_simulate("stdnormal", 500, 1, &s) != UD_STATUS_OK) return 1;
    UdEstimatorConfig cfg = {UD_ESTIMATOR_DENSITY_COMBINED, 1.0, 0.7, UD_WEIGHT_PIVOT_HALF, 0.0, 1.0};
    if (ud_estimate_grid(s, k, &cfg, -2.0, 1.0, 5, curve, 5) != UD_STATUS_OK) {
        fprintf(stderr, "%s\n", ud_last_error());
        return 1;
    }
    for (int i = 0; i < 5; i++) printf("f(%g)=%.6f\n", -2.0 + i, curve[i]);

    UdKernel *bad = NULL;
    UdStatus st = ud_kernel_new("gaussian", &bad);
    printf("bad kernel: status %d (%s)\n", (int)st, ud_last_error());

    ud_sample_free(s);
    ud_kernel_free(k);
    return bad == NULL ? 0 : 1;
}
