#ifndef YMGAP_H
#define YMGAP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum YmgapStatus {
  YMGAP_STATUS_OK = 0,
  YMGAP_STATUS_NULL_POINTER = 1,
  YMGAP_STATUS_INVALID_INPUT = 2,
  YMGAP_STATUS_CONFIG = 3,
  YMGAP_STATUS_NON_CONVERGENCE = 4,
  YMGAP_STATUS_NON_FINITE = 5,
  YMGAP_STATUS_UNKNOWN_SUITE = 6,
  YMGAP_STATUS_IO = 7,
  YMGAP_STATUS_PANIC = 8,
} YmgapStatus;

typedef enum YmgapGroup {
  YMGAP_GROUP_SU2 = 0,
  YMGAP_GROUP_SO3 = 1,
} YmgapGroup;

typedef enum YmgapAlgebra {
  YMGAP_ALGEBRA_SU2 = 0,
  YMGAP_ALGEBRA_SO3 = 1,
  YMGAP_ALGEBRA_SO4 = 2,
} YmgapAlgebra;

typedef enum YmgapVerdict {
  /*
   `F+` vanishes identically.
   */
  YMGAP_VERDICT_CASE1 = 0,
  YMGAP_VERDICT_STRICT_GAP_VIOLATED = 1,
  YMGAP_VERDICT_INEQUALITY_HOLDS = 2,
  YMGAP_VERDICT_EQUALITY = 3,
} YmgapVerdict;

/*
 Opaque gap configuration.
 */
typedef struct YmgapConfig YmgapConfig;

/*
 Opaque gap report.
 */
typedef struct YmgapReport YmgapReport;

/*
 Numbers of a gap report; `lhs` is the Yamabe invariant.
 */
typedef struct YmgapGapValues {
  double yamabe;
  double gamma1;
  double curvature_plus_l2;
  double weyl_plus_l2;
  double lhs;
  double rhs;
  double slack;
} YmgapGapValues;

/*
 `specialized` is NaN when the group has no closed-form value.
 */
typedef struct YmgapThresholds {
  double general;
  double specialized;
  double universal;
} YmgapThresholds;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failing call on this thread; empty after a success.
 The pointer stays valid until the next call on the same thread.
 */
const char *ymgap_last_error(void);

/*
 # Safety
 `s` must come from this library and not have been freed.
 */
void ymgap_string_free(char *s);

/*
 Default configuration: SU(2), standard instanton, round `S^4`.

 # Safety
 `out` must be valid for writes.
 */
enum YmgapStatus ymgap_config_new(struct YmgapConfig **out);

/*
 Configuration from a JSON document with the fields of the report's `config`.

 # Safety
 `json` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum YmgapStatus ymgap_config_from_json(const char *json, struct YmgapConfig **out);

/*
 # Safety
 `cfg` must be null or come from `ymgap_config_new` / `ymgap_config_from_json`.
 */
void ymgap_config_free(struct YmgapConfig *cfg);

/*
 # Safety
 `cfg` must be a live handle.
 */
enum YmgapStatus ymgap_config_set_group(struct YmgapConfig *cfg, enum YmgapGroup group);

/*
 # Safety
 `cfg` must be a live handle; `center` must point to four doubles.
 */
enum YmgapStatus ymgap_config_set_instanton(struct YmgapConfig *cfg,
                                            double scale,
                                            const double *center);

/*
 Switches to the trivial connection (or back when `flat` is false).

 # Safety
 `cfg` must be a live handle.
 */
enum YmgapStatus ymgap_config_set_flat(struct YmgapConfig *cfg, bool flat);

/*
 `||W+||` in L2; must be nonnegative.

 # Safety
 `cfg` must be a live handle.
 */
enum YmgapStatus ymgap_config_set_weyl_l2(struct YmgapConfig *cfg, double value);

/*
 Yamabe invariant; NaN restores the round `S^4` value.

 # Safety
 `cfg` must be a live handle.
 */
enum YmgapStatus ymgap_config_set_yamabe(struct YmgapConfig *cfg, double value);

/*
 Replaces the computed `||F+||`; NaN restores the computed value.

 # Safety
 `cfg` must be a live handle.
 */
enum YmgapStatus ymgap_config_set_curvature_l2(struct YmgapConfig *cfg, double value);

/*
 # Safety
 `cfg` must be a live handle.
 */
enum YmgapStatus ymgap_config_set_seed(struct YmgapConfig *cfg, uint64_t seed);

/*
 # Safety
 `cfg` must be a live handle.
 */
enum YmgapStatus ymgap_config_set_equality_tol(struct YmgapConfig *cfg, double tol);

/*
 # Safety
 `cfg` must be a live handle.
 */
enum YmgapStatus ymgap_config_set_radial_grid(struct YmgapConfig *cfg,
                                              size_t panels,
                                              size_t order,
                                              double r_max);

/*
 # Safety
 `cfg` must be a live handle.
 */
enum YmgapStatus ymgap_config_set_polar_nodes(struct YmgapConfig *cfg, size_t nodes);

/*
 Yang-Mills energy of the configured connection.

 # Safety
 `cfg` must be a live handle; `out` must be valid for writes.
 */
enum YmgapStatus ymgap_energy(const struct YmgapConfig *cfg, double *out);

/*
 Chern-Weil number of the configured connection, standard orientation.

 # Safety
 `cfg` must be a live handle; `out` must be valid for writes.
 */
enum YmgapStatus ymgap_kappa(const struct YmgapConfig *cfg, double *out);

/*
 Numerical `gamma0` and `gamma1` of an algebra; either output may be null.

 # Safety
 Non-null outputs must be valid for writes.
 */
enum YmgapStatus ymgap_gamma_estimates(enum YmgapAlgebra algebra,
                                       uint64_t seed,
                                       double *gamma0,
                                       double *gamma1);

/*
 # Safety
 `cfg` must be a live handle; `out` must be valid for writes.
 */
enum YmgapStatus ymgap_gap_report(const struct YmgapConfig *cfg, struct YmgapReport **out);

/*
 # Safety
 `report` must be null or come from `ymgap_gap_report`.
 */
void ymgap_report_free(struct YmgapReport *report);

/*
 # Safety
 `report` must be a live handle; `out` must be valid for writes.
 */
enum YmgapStatus ymgap_report_verdict(const struct YmgapReport *report, enum YmgapVerdict *out);

/*
 # Safety
 `report` must be a live handle; `out` must be valid for writes.
 */
enum YmgapStatus ymgap_report_values(const struct YmgapReport *report, struct YmgapGapValues *out);

/*
 Full report with provenance tags, as JSON.

 # Safety
 `report` must be a live handle; `out` must be valid for writes.
 */
enum YmgapStatus ymgap_report_to_json(const struct YmgapReport *report, char **out);

/*
 # Safety
 `out` must be valid for writes.
 */
enum YmgapStatus ymgap_thresholds(enum YmgapGroup group,
                                  double kappa_abs,
                                  double yamabe,
                                  double gamma1,
                                  struct YmgapThresholds *out);

/*
 `energy < 16 pi^2`.
 */
bool ymgap_flow_admissible(double energy);

/*
 First eigenvalue of `-6 Delta + Phi` on the round `S^4` for a radial `Phi`
 sampled at increasing `rho` in `[0, pi]` (linear interpolation in between).

 # Safety
 `rho` and `phi` must each point to `len` doubles; `out` must be valid for writes.
 */
enum YmgapStatus ymgap_lambda1(const double *rho,
                               const double *phi,
                               size_t len,
                               size_t nodes,
                               double *out);

/*
 Runs one verification suite; the result is written as JSON and `passed` is set.

 # Safety
 `cfg` must be a live handle, `name` NUL-terminated, outputs valid for writes.
 */
enum YmgapStatus ymgap_run_suite(const struct YmgapConfig *cfg,
                                 const char *name,
                                 char **json,
                                 bool *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* YMGAP_H */
