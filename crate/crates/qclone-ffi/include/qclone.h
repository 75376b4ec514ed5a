#ifndef QCLONE_H
#define QCLONE_H

/* Generated by cbindgen from the qclone-ffi crate; do not edit by hand. */

#include <stdbool.h>
#include <stdint.h>
#include <stddef.h>

// Status code returned by every fallible entry point.
typedef enum {
  // The call succeeded.
  QC_OK = 0,
  // A pointer was null or a parameter was out of range.
  QC_INVALID_ARGUMENT = 1,
  // An internal invariant failed.
  QC_INTERNAL_ERROR = 2,
} QcStatus;

// Function family selector.
typedef enum {
  // The family whose base level is n = 3.
  QC_VARIANT_A = 0,
  // The family whose base level is n = 2.
  QC_VARIANT_B = 1,
} QcVariant;

// Opaque handle to a function family at a fixed level.
typedef struct QcFamily QcFamily;

// Cardinalities of one family.
typedef struct {
  // Oracle input bits.
  size_t n;
  // Candidates for the first hidden function (always 3).
  size_t s_f0;
  // Size of the s1 basis (2^n).
  size_t s1;
  // Size of the s2 basis (2^n).
  size_t s2;
  // Candidates for the later hidden functions (2^(n+1)).
  size_t s_f12;
  // Answer pairs (2^n).
  size_t h_sets;
} QcFamilyCounts;

// Optimal cloning data for one family.
typedef struct {
  // Maximal per-state cloning efficiencies.
  double gamma[3];
  // Mean flag-success probability over a uniform input.
  double p_success;
  // Posterior over the candidates after a failure flag.
  double posterior[3];
  // Smallest eigenvalue of the achievability residual at the optimum.
  double min_residual_eig;
} QcEfficiencies;

// Analytic success probabilities at the optimal efficiencies.
typedef struct {
  // Best no-cloning success probability.
  double p1;
  // Cloning-strategy success probability.
  double p2;
  // Alternative cloning constant, or NaN when the family defines none.
  double p2_alt;
  // Flag-success probability of the cloner.
  double p_success;
  // Top posterior weight after a failure flag.
  double posterior_top;
} QcAnalytic;

// Aggregate counts of one seeded simulation.
typedef struct {
  // Trials per strategy.
  uint64_t trials;
  // Wins of the no-cloning strategy.
  uint64_t no_cloning_successes;
  // Wins of the cloning strategy.
  uint64_t cloning_successes;
  // Trials whose clone attempt flagged success.
  uint64_t flag_successes;
  // Trials whose clone attempt flagged failure.
  uint64_t flag_failures;
  // Empirical no-cloning win rate.
  double no_cloning_rate;
  // Empirical cloning win rate.
  double cloning_rate;
  // Analytic no-cloning score.
  double no_cloning_analytic;
  // Analytic cloning score.
  double cloning_analytic;
} QcSimulation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Builds the family `variant` at level `n` and writes a handle to `out`.
//
// # Safety
// `out` must be a valid pointer to a `QcFamily *`.
QcStatus qc_family_new(QcVariant variant, size_t n, QcFamily **out);

// Releases a family handle; accepts null.
//
// # Safety
// `family` must be null or a pointer from qc_family_new(), not yet freed.
void qc_family_free(QcFamily *family);

// Writes the family's cardinalities to `out`.
//
// # Safety
// `family` must come from qc_family_new(); `out` must be valid.
QcStatus qc_family_counts(const QcFamily *family, QcFamilyCounts *out);

// Looks up the answer-pair index of a function given as a truth-table
// string of '0'/'1' characters of length 2^n (entry k is the value at
// input k). Writes the index, or -1 when the function lies outside the
// answer space.
//
// # Safety
// `family` must come from qc_family_new(); `table` must be a valid
// NUL-terminated string; `out` must be valid.
QcStatus qc_family_h_set_of(const QcFamily *family, const char *table, ptrdiff_t *out);

// Writes the full family listing as a JSON document.
//
// # Safety
// `family` must come from qc_family_new(); `out` must be valid. The
// string is released with qc_string_free().
QcStatus qc_family_to_json(const QcFamily *family, char **out);

// Computes the maximal cloning efficiencies for `variant` at level `n`.
//
// # Safety
// `out` must be a valid pointer.
QcStatus qc_efficiencies(QcVariant variant, size_t n, QcEfficiencies *out);

// Computes the analytic scores of both strategies at the optimal
// efficiencies.
//
// # Safety
// `out` must be a valid pointer.
QcStatus qc_analytic(QcVariant variant, size_t n, QcAnalytic *out);

// Runs the seeded Monte Carlo comparison and writes aggregate counts.
// Identical parameters reproduce identical counts.
//
// # Safety
// `out` must be a valid pointer.
QcStatus qc_simulate(QcVariant variant,
                     size_t n,
                     uint64_t trials,
                     uint64_t seed,
                     bool distinct_f12,
                     bool physical_wrong_branch,
                     QcSimulation *out);

// Runs the seeded Monte Carlo comparison and writes the full report as a
// JSON document (the same schema the command-line tool prints).
//
// # Safety
// `out` must be a valid pointer. The string is released with
// qc_string_free().
QcStatus qc_simulate_json(QcVariant variant,
                          size_t n,
                          uint64_t trials,
                          uint64_t seed,
                          bool distinct_f12,
                          bool physical_wrong_branch,
                          char **out);

// Releases a string returned by this library; accepts null.
//
// # Safety
// `s` must be null or an unfreed string returned by this library.
void qc_string_free(char *s);

// A static, human-readable name for a status code.
const char *qc_status_name(QcStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QCLONE_H */
