#ifndef QWHITTAKER_H
#define QWHITTAKER_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum QwStatus {
  QW_STATUS_OK = 0,
  // A null pointer, bad UTF-8 or an out-of-range parameter.
  QW_STATUS_INVALID_ARGUMENT = 1,
  // Input that fails the interlacing constraints or is malformed.
  QW_STATUS_INVALID_CONFIGURATION = 2,
  // `(L, N, m1, m2)` outside the admissible range.
  QW_STATUS_SECTOR_BOUNDS = 3,
  // Enumeration would exceed the candidate cap.
  QW_STATUS_TOO_LARGE = 4,
  // A check ran and failed.
  QW_STATUS_VERIFICATION_FAILED = 5,
  // An internal invariant broke.
  QW_STATUS_INTERNAL = 6,
} QwStatus;

// Opaque configuration handle.
typedef struct QwConfig QwConfig;

// Opaque floating-point parameter handle.
typedef struct QwParams QwParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call from the same thread.
const char *qw_last_error(void);

// Library version as a static NUL-terminated string.
const char *qw_version(void);

// # Safety
// `s` must be null or a string returned by this library, freed once.
void qw_string_free(char *s);

// Canonical configuration of sector `(l, n, m1, m2)`.
//
// # Safety
// `out` must be a valid pointer.
enum QwStatus qw_config_canonical(uint32_t l,
                                  uint32_t n,
                                  uint32_t m1,
                                  uint32_t m2,
                                  struct QwConfig **out);

// Parses `{"L": .., "N": .., "rows": [[..], ..]}`. The result must validate.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum QwStatus qw_config_from_json(const char *json, struct QwConfig **out);

// # Safety
// `config` must be a live handle; `out` a valid pointer.
enum QwStatus qw_config_to_json(const struct QwConfig *config, char **out);

// # Safety
// `config` must be null or a handle from this library, freed once.
void qw_config_free(struct QwConfig *config);

// Writes 1 to `out` if the configuration interlaces, else 0.
//
// # Safety
// `config` must be a live handle; `out` a valid pointer.
enum QwStatus qw_config_validate(const struct QwConfig *config, int32_t *out);

// Torus dimensions and sector index. `m2` is 0 for flat configurations.
//
// # Safety
// `config` must be a live handle; the out-pointers must be valid.
enum QwStatus qw_config_sector(const struct QwConfig *config,
                               uint32_t *l,
                               uint32_t *n,
                               uint32_t *m1,
                               uint32_t *m2);

// Float parameters `q` in `[0, 1)` and `n_rows` positive activities.
//
// # Safety
// `a` must point to `n_rows` doubles; `out` must be valid.
enum QwStatus qw_params_new(double q, const double *a, size_t n_rows, struct QwParams **out);

// # Safety
// `params` must be null or a handle from this library, freed once.
void qw_params_free(struct QwParams *params);

// Natural log of the unnormalized Gibbs weight.
//
// # Safety
// Handles must be live; `out` must be valid.
enum QwStatus qw_log_weight(const struct QwConfig *config,
                            const struct QwParams *params,
                            double *out);

// Runs the dynamics from `start` up to time `t_max` and returns the final
// state as a new handle together with the number of events.
//
// # Safety
// Handles must be live; out-pointers must be valid.
enum QwStatus qw_simulate(const struct QwConfig *start,
                          const struct QwParams *params,
                          double t_max,
                          uint64_t seed,
                          struct QwConfig **out_final,
                          uint64_t *out_events);

// Exact stationarity check on sector `(l, n, m1, m2)`. `q` and the
// `n_rows` activities are rational strings such as `"1/2"`. Returns
// `VerificationFailed` when the residual is nonzero; in both cases the JSON
// report is written to `report` if it is not null.
//
// # Safety
// `q` and each `a[i]` must be NUL-terminated strings; `report` may be null.
enum QwStatus qw_verify_stationarity(uint32_t l,
                                     uint32_t n,
                                     uint32_t m1,
                                     uint32_t m2,
                                     const char *q,
                                     const char *const *a,
                                     size_t n_rows,
                                     char **report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QWHITTAKER_H */
