#ifndef MSNCAP_H
#define MSNCAP_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Which extremal arrangement [`msn_construct`] builds.
 */
typedef enum MsnConstruction {
  MSN_CONSTRUCTION_MIN_GMSN = 0,
  MSN_CONSTRUCTION_MAX_GMSN = 1,
  /**
   * Two classes of sizes `m` and `n - m`.
   */
  MSN_CONSTRUCTION_GRID = 2,
  MSN_CONSTRUCTION_OPT3 = 3,
  MSN_CONSTRUCTION_OPT4 = 4,
  /**
   * Collector/distributor family with `s` slopes.
   */
  MSN_CONSTRUCTION_CD_FAMILY = 5,
} MsnConstruction;

/**
 * Result of every fallible call.
 */
typedef enum MsnStatus {
  MSN_STATUS_OK = 0,
  MSN_STATUS_NULL_POINTER = 1,
  MSN_STATUS_INVALID_ARGUMENT = 2,
  MSN_STATUS_INVALID_NETWORK = 3,
  MSN_STATUS_INVALID_ARRANGEMENT = 4,
  MSN_STATUS_UNSUPPORTED = 5,
  MSN_STATUS_BUFFER_TOO_SMALL = 6,
  MSN_STATUS_OVERFLOW = 7,
  MSN_STATUS_INTERNAL = 99,
} MsnStatus;

/**
 * Opaque line arrangement with the tie policy it is read with.
 */
typedef struct MsnArrangement MsnArrangement;

/**
 * Opaque event sequence.
 */
typedef struct MsnNetwork MsnNetwork;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Description of the last failure on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *msn_last_error(void);

/**
 * Static name of a status code.
 */
const char *msn_status_name(enum MsnStatus status);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void msn_string_free(char *s);

/**
 * Builds a network from `len` pairs stored as `pairs[2i], pairs[2i+1]`
 * (sensors are numbered from 1). `restricted` requires every pair exactly once.
 *
 * # Safety
 * `pairs` must point to `2 * len` readable values; `out` must be writable.
 */
enum MsnStatus msn_network_new(size_t n,
                               const size_t *pairs,
                               size_t len,
                               bool restricted,
                               struct MsnNetwork **out);

/**
 * Parses a network file, or an arrangement file read into its event sequence.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum MsnStatus msn_network_from_json(const char *json, struct MsnNetwork **out);

/**
 * Network file JSON for `net`; release with [`msn_string_free`].
 *
 * # Safety
 * `net` must be a live handle; `out` must be writable.
 */
enum MsnStatus msn_network_to_json(const struct MsnNetwork *net, char **out);

/**
 * # Safety
 * `net` must be null or a handle from this library not yet freed.
 */
void msn_network_free(struct MsnNetwork *net);

/**
 * Number of sensors, or 0 for a null handle.
 *
 * # Safety
 * `net` must be null or a live handle.
 */
size_t msn_network_sensors(const struct MsnNetwork *net);

/**
 * Number of events, or 0 for a null handle.
 *
 * # Safety
 * `net` must be null or a live handle.
 */
size_t msn_network_events(const struct MsnNetwork *net);

/**
 * Capacity as a reduced fraction; `absolute` divides by `n·C(n,2)` instead
 * of `n·L`.
 *
 * # Safety
 * `net` must be a live handle; `num` and `den` must be writable.
 */
enum MsnStatus msn_network_capacity(const struct MsnNetwork *net,
                                    bool absolute,
                                    uint64_t *num,
                                    uint64_t *den);

/**
 * Writes the delivery count of every event into `buf`. `*written` receives
 * the event count even when `cap` is too small.
 *
 * # Safety
 * `buf` must hold `cap` writable values; `written` must be writable.
 */
enum MsnStatus msn_network_deliveries(const struct MsnNetwork *net,
                                      uint64_t *buf,
                                      size_t cap,
                                      size_t *written);

/**
 * Builds an extremal arrangement. `m` is used by `Grid`, `s` by `CdFamily`.
 *
 * # Safety
 * `out` must be writable.
 */
enum MsnStatus msn_construct(enum MsnConstruction kind,
                             size_t n,
                             size_t m,
                             size_t s,
                             struct MsnArrangement **out);

/**
 * Parses an arrangement file.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum MsnStatus msn_arrangement_from_json(const char *json, struct MsnArrangement **out);

/**
 * Arrangement file JSON for `arr`; release with [`msn_string_free`].
 *
 * # Safety
 * `arr` must be a live handle; `out` must be writable.
 */
enum MsnStatus msn_arrangement_to_json(const struct MsnArrangement *arr, char **out);

/**
 * Number of lines, or 0 for a null handle.
 *
 * # Safety
 * `arr` must be null or a live handle.
 */
size_t msn_arrangement_lines(const struct MsnArrangement *arr);

/**
 * Event sequence of an arrangement.
 *
 * # Safety
 * `arr` must be a live handle; `out` must be writable.
 */
enum MsnStatus msn_arrangement_network(const struct MsnArrangement *arr, struct MsnNetwork **out);

/**
 * # Safety
 * `arr` must be null or a handle from this library not yet freed.
 */
void msn_arrangement_free(struct MsnArrangement *arr);

/**
 * Decides whether `net` is drawn by lines with at most `max_slopes` (1 to 4)
 * slopes. On a positive answer a verified witness is stored in `*witness`
 * when `witness` is non-null; otherwise `*witness` is set to null.
 *
 * # Safety
 * `net` must be a live handle; `realizable` must be writable; `witness` may
 * be null.
 */
enum MsnStatus msn_realize(const struct MsnNetwork *net,
                           size_t max_slopes,
                           bool *realizable,
                           struct MsnArrangement **witness);

/**
 * Evaluates a closed form by name (for example `"max3"` or `"maxabs-limit"`).
 * Parameters that a formula does not use are ignored; pass 0 for "absent".
 * `*value` receives the nearest double; when the value is rational and
 * `exact` is non-null, `*exact` receives `"p/q"` (release with
 * [`msn_string_free`]), otherwise null.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `value` must be writable; `exact`
 * may be null.
 */
enum MsnStatus msn_formula(const char *name, size_t n, size_t s, double *value, char **exact);

/**
 * Seeded mean capacity of random line arrangements; `slopes == 0` draws
 * distinct slopes, otherwise at most `slopes` distinct slopes.
 *
 * # Safety
 * `mean` and `stderr` must be writable.
 */
enum MsnStatus msn_estimate_capacity(size_t n,
                                     size_t slopes,
                                     size_t trials,
                                     uint64_t seed,
                                     double *mean,
                                     double *stderr);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MSNCAP_H */
