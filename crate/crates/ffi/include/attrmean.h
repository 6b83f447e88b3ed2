#ifndef ATTRMEAN_H
#define ATTRMEAN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AmStatus {
  AM_STATUS_OK = 0,
  AM_STATUS_NULL_POINTER = 1,
  /**
   * Not UTF-8, or malformed text input.
   */
  AM_STATUS_PARSE = 2,
  /**
   * Input parsed but failed validation, or the computation is undefined.
   */
  AM_STATUS_DOMAIN = 3,
  /**
   * Exact enumeration above the sample cap.
   */
  AM_STATUS_ENUMERATION_TOO_LARGE = 4,
  /**
   * A Rust panic was caught at the boundary.
   */
  AM_STATUS_PANIC = 5,
} AmStatus;

/**
 * Raw unit records.
 */
typedef struct AmPopulation AmPopulation;

/**
 * Population parameters.
 */
typedef struct AmSummary AmSummary;

/**
 * Sample sizes; `n_prime = 0` means a single-phase design. The
 * population size comes from the summary or population handle.
 */
typedef struct AmDesign {
  size_t n;
  size_t n_prime;
} AmDesign;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failing call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *am_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *am_version(void);

void am_string_free(char *s);

/**
 * Summary from entered parameters.
 */
enum AmStatus am_summary_new(size_t population_size,
                             double mean_y,
                             double p1,
                             double p2,
                             double var_y,
                             double var_phi1,
                             double var_phi2,
                             double rho_pb1,
                             double rho_pb2,
                             double rho_phi,
                             struct AmSummary **out);

/**
 * Summary from summary-file text (`key = value` lines).
 */
enum AmStatus am_summary_parse(const char *text_in, struct AmSummary **out);

/**
 * Bundled dataset summary, `"rice"` or `"wheat"`.
 */
enum AmStatus am_summary_dataset(const char *name, struct AmSummary **out);

size_t am_summary_population_size(const struct AmSummary *s);

double am_summary_mean_y(const struct AmSummary *s);

void am_summary_free(struct AmSummary *s);

/**
 * Population from CSV text with header `y,phi1,phi2`.
 */
enum AmStatus am_population_from_csv(const char *csv, struct AmPopulation **out);

/**
 * Population from parallel columns of length `len`.
 */
enum AmStatus am_population_from_columns(const double *y,
                                         const uint8_t *phi1,
                                         const uint8_t *phi2,
                                         size_t len,
                                         struct AmPopulation **out);

/**
 * Synthetic population from a generator spec such as
 * `N=1000,p00=0.4,p01=0.1,p10=0.1,p11=0.4,a=50,b1=10,b2=6,sigma=8,seed=1`.
 */
enum AmStatus am_population_generate(const char *spec, struct AmPopulation **out);

size_t am_population_len(const struct AmPopulation *p);

/**
 * Summary of a raw population; the new handle is independent of `p`.
 */
enum AmStatus am_population_summary(const struct AmPopulation *p, struct AmSummary **out);

void am_population_free(struct AmPopulation *p);

/**
 * First-order MSE of one estimator spec.
 */
enum AmStatus am_theory_mse(const struct AmSummary *s,
                            struct AmDesign design,
                            const char *spec,
                            double *out);

/**
 * First-order bias of one estimator spec.
 */
enum AmStatus am_theory_bias(const struct AmSummary *s,
                             struct AmDesign design,
                             const char *spec,
                             double *out);

/**
 * MSE-minimizing single-phase composite weights.
 */
enum AmStatus am_optimal_weights_single(const struct AmSummary *s,
                                        struct AmDesign design,
                                        double a1,
                                        double a2,
                                        double b1,
                                        double b2,
                                        double *w1,
                                        double *w2);

/**
 * MSE-minimizing two-phase composite weights; `design.n_prime` must be set.
 */
enum AmStatus am_optimal_weights_double(const struct AmSummary *s,
                                        struct AmDesign design,
                                        double m1,
                                        double m2,
                                        double n1,
                                        double n2,
                                        double *h1,
                                        double *h2);

/**
 * Single-phase estimate from sample statistics and known proportions.
 */
enum AmStatus am_point_estimate(const char *spec,
                                double ybar,
                                double p1,
                                double p2,
                                double big_p1,
                                double big_p2,
                                double *out);

/**
 * Two-phase estimate; only `P2` is known.
 */
enum AmStatus am_two_phase_estimate(const char *spec,
                                    double ybar,
                                    double p1,
                                    double p1_prime,
                                    double p2_prime,
                                    double big_p2,
                                    double *out);

/**
 * Theory table as CSV (`estimator,params,bias,mse,pre,flags`).
 */
enum AmStatus am_theory_table_csv(const struct AmSummary *s,
                                  struct AmDesign design,
                                  const char *specs,
                                  int as_tabulated,
                                  char **out);

/**
 * Monte Carlo (`exact = 0`) or exact enumeration as simulation CSV.
 */
enum AmStatus am_simulate_csv(const struct AmPopulation *p,
                              struct AmDesign design,
                              const char *specs,
                              uint64_t replicates,
                              uint64_t seed,
                              int exact,
                              char **out);

/**
 * Corrections ledger as CSV.
 */
enum AmStatus am_ledger_csv(char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ATTRMEAN_H */
