#pragma once

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of a call. Zero means success; every other value has a matching
 * human-readable message available from `ptlab_last_error`.
 */
typedef enum PtlabStatus {
  PtlabStatus_Ok = 0,
  /**
   * A required pointer argument was NULL.
   */
  PtlabStatus_NullPointer = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  PtlabStatus_InvalidUtf8 = 2,
  /**
   * A value was outside the documented domain.
   */
  PtlabStatus_InvalidArgument = 3,
  /**
   * A size cap protecting exact enumeration was exceeded.
   */
  PtlabStatus_ResourceLimit = 4,
  /**
   * An exact linear system degenerated.
   */
  PtlabStatus_SingularSystem = 5,
  /**
   * A required moment or cumulant was absent from the supplied data.
   */
  PtlabStatus_MissingMoment = 6,
  /**
   * A word, pattern, or numeric literal failed to parse.
   */
  PtlabStatus_ParseError = 7,
  /**
   * The operation is recognized but out of scope.
   */
  PtlabStatus_Unsupported = 8,
  /**
   * The experiment configuration is malformed.
   */
  PtlabStatus_ConfigError = 9,
  /**
   * File or stream I/O failed.
   */
  PtlabStatus_IoError = 10,
  /**
   * JSON serialization or deserialization failed.
   */
  PtlabStatus_JsonError = 11,
  /**
   * The library caught an internal panic instead of unwinding across
   * the language boundary.
   */
  PtlabStatus_InternalPanic = 12,
} PtlabStatus;

/**
 * Output format selector for rendered tables.
 */
typedef enum PtlabFormat {
  PtlabFormat_Csv = 0,
  PtlabFormat_Json = 1,
} PtlabFormat;

/**
 * Partition family selector for `ptlab_partition_count`.
 */
typedef enum PtlabFamily {
  /**
   * Perfect matchings of `2m` points.
   */
  PtlabFamily_Pairings = 0,
  /**
   * Matchings that pair plain with starred points (alternating signs).
   */
  PtlabFamily_SignRespectingPairings = 1,
  /**
   * Non-crossing partitions of `[m]`.
   */
  PtlabFamily_Noncrossing = 2,
  /**
   * Non-crossing partitions with blocks of size one or two.
   */
  PtlabFamily_SmallBlockNoncrossing = 3,
  /**
   * Non-crossing partitions of `2m` points with the three admitted
   * block shapes.
   */
  PtlabFamily_Admissible = 4,
  /**
   * All set partitions of `[m]`.
   */
  PtlabFamily_SetPartitions = 5,
} PtlabFamily;

/**
 * An experiment description: which quantity to verify, at which
 * dimensions, with how many samples, under which tolerance policy.
 */
typedef struct PtlabExperiment PtlabExperiment;

/**
 * The outcome of one experiment run: a table of verdict or structure rows.
 */
typedef struct PtlabReport PtlabReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the message describing the most recent failure on this thread
 * into `buffer` (NUL-terminated, truncated to `capacity` bytes) and
 * returns the full length of the message including its NUL terminator.
 * Call with a NULL buffer to query the required capacity. After a
 * successful call the message is empty.
 */
uintptr_t ptlab_last_error(char *buffer, uintptr_t capacity);

/**
 * Returns the library version as a static string; do not free it.
 */
const char *ptlab_version(void);

/**
 * Releases a string returned through a `char**` out-parameter. NULL is
 * ignored.
 */
void ptlab_string_free(char *text);

/**
 * Parses an experiment from its JSON description (the same format the
 * command-line tool reads via `--config`). On success `*out` owns the new
 * handle; release it with `ptlab_experiment_free`.
 */
enum PtlabStatus ptlab_experiment_from_json(const char *json, struct PtlabExperiment **out);

/**
 * Returns the experiment kind as a static string; do not free it.
 */
const char *ptlab_experiment_name(const struct PtlabExperiment *experiment);

/**
 * Replaces the experiment's seed. Fails for the structural table, which
 * is exact and takes no randomness.
 */
enum PtlabStatus ptlab_experiment_set_seed(struct PtlabExperiment *experiment, uint64_t seed);

/**
 * Runs the experiment and hands back a report handle; release it with
 * `ptlab_report_free`.
 */
enum PtlabStatus ptlab_experiment_run(const struct PtlabExperiment *experiment,
                                      struct PtlabReport **out);

/**
 * Renders the exact predictions for the experiment without touching any
 * sampler, as CSV or JSON. The caller frees `*out` with
 * `ptlab_string_free`.
 */
enum PtlabStatus ptlab_experiment_predictions(const struct PtlabExperiment *experiment,
                                              enum PtlabFormat format,
                                              char **out);

/**
 * Releases an experiment handle. NULL is ignored.
 */
void ptlab_experiment_free(struct PtlabExperiment *experiment);

/**
 * Renders a report as CSV or JSON text. The caller frees `*out` with
 * `ptlab_string_free`.
 */
enum PtlabStatus ptlab_report_render(const struct PtlabReport *report,
                                     enum PtlabFormat format,
                                     char **out);

/**
 * Sets `*out` to 1 when every row of the report passed, 0 otherwise.
 */
enum PtlabStatus ptlab_report_all_pass(const struct PtlabReport *report, uint8_t *out);

/**
 * Sets `*out` to the number of rows in the report.
 */
enum PtlabStatus ptlab_report_row_count(const struct PtlabReport *report, uintptr_t *out);

/**
 * Releases a report handle. NULL is ignored.
 */
void ptlab_report_free(struct PtlabReport *report);

/**
 * Writes the exact Weingarten value of the given cycle type at dimension
 * `dim` as a rational string "numerator/denominator". `parts` lists the
 * nontrivial cycle lengths; when `order` is nonzero the type is padded
 * with fixed points up to that order. The caller frees `*out`.
 */
enum PtlabStatus ptlab_wg_rational(const uint64_t *parts,
                                   uintptr_t parts_len,
                                   uint64_t order,
                                   uint64_t dim,
                                   char **out);

/**
 * Writes the symbolic Weingarten value of the given cycle type as JSON
 * with fields `cycle_type`, `numerator`, `denominator` (integer
 * coefficient strings in ascending powers of the dimension), and
 * `display`. The caller frees `*out`.
 */
enum PtlabStatus ptlab_wg_symbolic_json(const uint64_t *parts,
                                        uintptr_t parts_len,
                                        uint64_t order,
                                        char **out);

/**
 * Evaluates the exact mean of a product of Haar-unitary entries given as
 * a pattern like "1.1 2.2 1.1* 2.2*" (row.column per factor, `*` for a
 * conjugated factor) at dimension `dim`, written as a rational string.
 * The caller frees `*out`.
 */
enum PtlabStatus ptlab_entry_moment(const char *word, uint64_t dim, char **out);

/**
 * Sets `*out` to the number of elements of the chosen partition family at
 * the given size.
 */
enum PtlabStatus ptlab_partition_count(enum PtlabFamily family, uintptr_t size, uint64_t *out);

/**
 * Computes the limit moment and free-cumulant series of the right partial
 * flip from first- and second-order data of the base family.
 *
 * Inputs are complex numbers as `(re, im)` pairs of doubles:
 * - `m1`: mean of the base variable; `m1_star`: mean of its adjoint.
 * - `m2`: the four second-order mixed moments (not cumulants; the mean
 *   product is subtracted internally) in the order (plain,plain),
 *   (plain,star), (star,plain), (star,star) — eight doubles.
 *
 * Outputs: `out_moments` and `out_cumulants` each receive `max_order`
 * complex values (`2 * max_order` doubles), orders `1..=max_order`. The
 * conversion is exact internally; results are rounded once on output.
 */
enum PtlabStatus ptlab_flip_series(const double *m1,
                                   const double *m1_star,
                                   const double *m2,
                                   uintptr_t max_order,
                                   double *out_moments,
                                   double *out_cumulants);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus
