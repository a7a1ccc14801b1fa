#ifndef QQUERY_H
#define QQUERY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QqStatus {
  QQ_STATUS_OK = 0,
  QQ_STATUS_NULL_POINTER = 1,
  QQ_STATUS_INVALID_UTF8 = 2,
  QQ_STATUS_PARSE = 3,
  QQ_STATUS_INVALID_ARGUMENT = 4,
  QQ_STATUS_ANALYSIS = 5,
  QQ_STATUS_PANIC = 6,
} QqStatus;

typedef enum QqSidedness {
  QQ_SIDEDNESS_EXACT = 0,
  QQ_SIDEDNESS_ONE_SIDED_ON0 = 1,
  QQ_SIDEDNESS_ONE_SIDED_ON1 = 2,
  QQ_SIDEDNESS_TWO_SIDED = 3,
} QqSidedness;

/**
 * Opaque circuit handle.
 */
typedef struct QqProgram QqProgram;

/**
 * Opaque error-report handle.
 */
typedef struct QqReport QqReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread.  The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *qq_last_error(void);

/**
 * Frees a string returned by this library.  Null is ignored.
 *
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void qq_string_free(char *s);

/**
 * Parses a circuit in the text format.
 *
 * # Safety
 * `source` must be a valid C string; `out` must be writable.
 */
enum QqStatus qq_program_parse(const char *source, struct QqProgram **out);

/**
 * Builds one of the bundled circuits (`OR`, `OR_SINGLE_FINAL`, `ANDOR2`,
 * `XOR_EXACT`, `PARITY_LASVEGAS`) at angle `theta`.
 *
 * # Safety
 * `name` must be a valid C string; `out` must be writable.
 */
enum QqStatus qq_program_builtin(const char *name, double theta, struct QqProgram **out);

/**
 * # Safety
 * `p` must be null or a handle from this library, not yet freed.
 */
void qq_program_free(struct QqProgram *p);

/**
 * Text form of the circuit; free with [`qq_string_free`].
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
enum QqStatus qq_program_serialize(const struct QqProgram *p, char **out);

/**
 * # Safety
 * `p` must be null or a live handle.
 */
size_t qq_program_num_qubits(const struct QqProgram *p);

/**
 * # Safety
 * `p` must be null or a live handle.
 */
size_t qq_program_oracle_arity(const struct QqProgram *p);

/**
 * Exact output distribution on the function with truth-table index `bits`
 * (first value most significant).  `probs` receives P(0), P(1), P(?).
 *
 * # Safety
 * `p` must be a live handle; `probs` must point to three writable doubles.
 */
enum QqStatus qq_run_exact(const struct QqProgram *p, uint64_t bits, double *probs);

/**
 * Error report of `p` for the property named by `property` (`or`, `and`,
 * `xor`, `andor:2`, ...).
 *
 * # Safety
 * `p` must be a live handle, `property` a valid C string, `out` writable.
 */
enum QqStatus qq_analyze(const struct QqProgram *p, const char *property, struct QqReport **out);

/**
 * # Safety
 * `r` must be null or a handle from this library, not yet freed.
 */
void qq_report_free(struct QqReport *r);

/**
 * Worst-case error; NaN for a null handle.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
double qq_report_p_error_max(const struct QqReport *r);

/**
 * Worst-case expected oracle calls; NaN for a null handle.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
double qq_report_q_max(const struct QqReport *r);

/**
 * # Safety
 * `r` must be a live handle; `out` writable.
 */
enum QqStatus qq_report_sidedness(const struct QqReport *r, enum QqSidedness *out);

/**
 * Number of per-function entries; 0 for a null handle.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
size_t qq_report_function_count(const struct QqReport *r);

/**
 * Truth-table index and error probability of entry `index`.
 *
 * # Safety
 * `r` must be a live handle; `bits` and `p_error` writable.
 */
enum QqStatus qq_report_function(const struct QqReport *r,
                                 size_t index,
                                 uint64_t *bits,
                                 double *p_error);

/**
 * JSON form of the report; free with [`qq_string_free`].
 *
 * # Safety
 * `r` must be a live handle, `label` a valid C string, `out` writable.
 */
enum QqStatus qq_report_json(const struct QqReport *r, const char *label, char **out);

/**
 * Minimax angle of a bundled template over `[lo, hi)`.  When `lo >= hi`
 * the template's default domain is used.  `property` may be null to use
 * the template's own property.
 *
 * # Safety
 * `template` must be a valid C string, `property` null or a valid C string,
 * the outputs writable.
 */
enum QqStatus qq_tune(const char *template_,
                      const char *property,
                      double lo,
                      double hi,
                      double *theta_star,
                      double *p_error_max);

/**
 * Largest error a `q`-query algorithm may have and still beat a classical
 * baseline of `big_q` expected queries; `sided` is 1 or 2.
 *
 * # Safety
 * `out` must be writable.
 */
enum QqStatus qq_threshold(double q, double big_q, uint8_t sided, double *out);

/**
 * Worst-case expected queries of depth-first pruning as a fraction.
 *
 * # Safety
 * `numer` and `denom` must be writable.
 */
enum QqStatus qq_dfp_worst_case(size_t depth, bool root_and, int64_t *numer, int64_t *denom);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QQUERY_H */
