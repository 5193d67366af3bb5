#include <stdio.h>
#include <string.h>
#include "qwhittaker.h"

#define CHECK(cond)                                                   \
    do {                                                              \
        if (!(cond)) {                                                \
            fprintf(stderr, "line %d: %s (%s)\n", __LINE__, #cond,    \
                    qw_last_error());                                 \
            return 1;                                                 \
        }                                                             \
    } while (0)

int main(void) {
    QwConfig *c = NULL;
    CHECK(qw_config_canonical(5, 2, 2, 1, &c) == QW_STATUS_OK);

    uint32_t l, n, m1, m2;
    CHECK(qw_config_sector(c, &l, &n, &m1, &m2) == QW_STATUS_OK);
    CHECK(l == 5 && n == 2 && m1 == 2 && m2 == 1);

    double a[2] = {1.0, 1.0};
    QwParams *p = NULL;
    CHECK(qw_params_new(0.5, a, 2, &p) == QW_STATUS_OK);

    QwConfig *end = NULL;
    uint64_t events = 0;
    CHECK(qw_simulate(c, p, 100.0, 1, &end, &events) == QW_STATUS_OK);
    CHECK(events > 0);
    int32_t ok = 0;
    CHECK(qw_config_validate(end, &ok) == QW_STATUS_OK && ok == 1);

    const char *as[2] = {"1", "2"};
    char *report = NULL;
    CHECK(qw_verify_stationarity(5, 2, 2, 1, "1/2", as, 2, &report) == QW_STATUS_OK);
    CHECK(strstr(report, "\"max_residual\":\"0\"") != NULL);
    qw_string_free(report);

    QwConfig *bad = NULL;
    CHECK(qw_config_canonical(3, 3, 2, 1, &bad) == QW_STATUS_SECTOR_BOUNDS);
    CHECK(strlen(qw_last_error()) > 0);

    qw_config_free(end);
    qw_config_free(c);
    qw_params_free(p);
    printf("ok %s\n", qw_version());
    return 0;
}
