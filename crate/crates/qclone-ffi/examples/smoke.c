/* Exercises the C API end to end: family lookup, efficiencies, analytic
 * scores, and a small seeded simulation. Returns 0 on success. */

#include <math.h>
#include <stdio.h>
#include <string.h>

#include "qclone.h"

int main(void) {
    QcFamily *family = NULL;
    if (qc_family_new(QC_VARIANT_B, 2, &family) != QC_OK) return 1;

    QcFamilyCounts counts;
    if (qc_family_counts(family, &counts) != QC_OK) return 2;
    if (counts.s_f0 != 3 || counts.s1 != 4 || counts.s_f12 != 8) return 3;

    /* "0011" sits in the answer space, "0001" does not. */
    ptrdiff_t idx = -2;
    if (qc_family_h_set_of(family, "0011", &idx) != QC_OK || idx < 0) return 4;
    if (qc_family_h_set_of(family, "0001", &idx) != QC_OK || idx != -1) return 5;

    QcEfficiencies eff;
    if (qc_efficiencies(QC_VARIANT_B, 2, &eff) != QC_OK) return 6;
    if (fabs(eff.gamma[0] - 1.0 / 7.0) > 1e-8) return 7;
    if (fabs(eff.gamma[1] - 4.0 / 7.0) > 1e-8) return 8;

    QcAnalytic analytic;
    if (qc_analytic(QC_VARIANT_A, 3, &analytic) != QC_OK) return 9;
    if (!(analytic.p2 > analytic.p1)) return 10;
    if (!isnan(analytic.p2_alt)) return 11;

    QcSimulation sim;
    if (qc_simulate(QC_VARIANT_B, 2, 20000, 7, false, false, &sim) != QC_OK) return 12;
    if (sim.trials != 20000) return 13;
    if (fabs(sim.cloning_rate - sim.cloning_analytic) > 0.02) return 14;

    char *json = NULL;
    if (qc_simulate_json(QC_VARIANT_B, 2, 1000, 7, false, false, &json) != QC_OK) return 15;
    if (strstr(json, "\"cloning\"") == NULL) return 16;
    qc_string_free(json);

    if (strcmp(qc_status_name(QC_OK), "ok") != 0) return 17;

    qc_family_free(family);
    qc_family_free(NULL);
    qc_string_free(NULL);
    printf("c smoke ok\n");
    return 0;
}
