/* Solves the triangle instance through the C API.
 *
 *   cargo build -p mrc-ffi --release
 *   cc -I crates/ffi/include crates/ffi/examples/smoke.c \
 *      target/release/libmrc_ffi.a -lpthread -ldl -lm -o smoke
 */
#include <stdio.h>
#include <stdlib.h>

#include "mrc.h"

static const char *TRIANGLE =
    "p mrc 3 3 1\n"
    "variant edge edge\n"
    "e 0 1 3\n"
    "e 0 2 1\n"
    "e 2 1 1\n"
    "q 0 1 2\n";

int main(void) {
    MrcInstance *instance = NULL;
    if (mrc_instance_parse(TRIANGLE, &instance) != MRC_STATUS_OK) {
        fprintf(stderr, "parse: %s\n", mrc_last_error());
        return 1;
    }
    MrcReport *report = NULL;
    MrcStatus status = mrc_solve(instance, 1.0, 20, 0, &report);
    if (report == NULL) {
        fprintf(stderr, "solve: %s\n", mrc_last_error());
        mrc_instance_free(instance);
        return 1;
    }
    double cost = 0.0, lp = 0.0, opt = 0.0;
    size_t removed[8];
    size_t len = 0;
    mrc_report_cost(report, &cost);
    mrc_report_lp_objective(report, &lp);
    mrc_report_removed(report, removed, 8, &len);
    mrc_oracle(instance, 20, &opt);
    printf("mrc %s status=%d feasible=%d lp=%g cost=%g opt=%g removed=%zu\n", mrc_version(), (int)status,
           (int)mrc_report_feasible(report), lp, cost, opt, len);
    mrc_report_free(report);
    mrc_instance_free(instance);
    return status == MRC_STATUS_OK && cost == 1.0 && opt == 1.0 ? 0 : 1;
}
