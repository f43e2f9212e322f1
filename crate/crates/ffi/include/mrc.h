#ifndef MRC_H
#define MRC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>

typedef enum MrcStatus {
  MRC_STATUS_OK = 0,
  // No cut exists, or the produced cut failed verification.
  MRC_STATUS_INFEASIBLE = 2,
  // Unparseable text or invalid parameters.
  MRC_STATUS_INPUT_ERROR = 3,
  // The LP hit its row cap or failed numerically.
  MRC_STATUS_LP_NON_CONVERGED = 4,
  MRC_STATUS_NULL_ARGUMENT = 10,
  MRC_STATUS_INVALID_UTF8 = 11,
  // A caller buffer was too small; the needed length was still written.
  MRC_STATUS_BUFFER_TOO_SMALL = 12,
  // Internal panic caught at the boundary.
  MRC_STATUS_INTERNAL = 13,
} MrcStatus;

// Parsed problem instance.
typedef struct MrcInstance MrcInstance;

// Result of one solver run, with its JSON rendering cached.
typedef struct MrcReport MrcReport;

// Message for the most recent failure on this thread, or NULL. The pointer
// stays valid until the next failing call on the same thread.
const char *mrc_last_error(void);

// Library version as a static NUL-terminated string.
const char *mrc_version(void);

// Parses an instance from NUL-terminated text.
//
// # Safety
// `text` must be NULL or a valid NUL-terminated string; `out` must be NULL
// or point to writable storage for one pointer.
enum MrcStatus mrc_instance_parse(const char *text, struct MrcInstance **out);

// Releases an instance. NULL is ignored.
//
// # Safety
// `instance` must be NULL or a handle from [`mrc_instance_parse`] that has
// not been freed.
void mrc_instance_free(struct MrcInstance *instance);

// Vertex count, or 0 for NULL.
//
// # Safety
// `instance` must be NULL or a live handle.
size_t mrc_instance_vertex_count(const struct MrcInstance *instance);

// Edge count, or 0 for NULL.
//
// # Safety
// `instance` must be NULL or a live handle.
size_t mrc_instance_edge_count(const struct MrcInstance *instance);

// Demand count, or 0 for NULL.
//
// # Safety
// `instance` must be NULL or a live handle.
size_t mrc_instance_demand_count(const struct MrcInstance *instance);

// Writes the canonical text form to `*out`; free it with [`mrc_string_free`].
//
// # Safety
// `instance` must be NULL or a live handle; `out` must be NULL or writable.
enum MrcStatus mrc_instance_serialize(const struct MrcInstance *instance, char **out);

// Releases a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must be NULL or a string from [`mrc_instance_serialize`] not yet freed.
void mrc_string_free(char *s);

// Runs the full pipeline. `beta <= 1` selects exact mode; larger values
// solve at thresholds `ceil(beta * k)`. `oracle_cap` bounds the exhaustive
// comparison (0 disables it). `row_cap` of 0 keeps the default.
//
// A report is written to `*out` whenever the run got that far, including
// infeasible and non-converged runs; the return value is the run status.
//
// # Safety
// `instance` must be NULL or a live handle; `out` must be NULL or writable.
enum MrcStatus mrc_solve(const struct MrcInstance *instance,
                         double beta,
                         size_t oracle_cap,
                         size_t row_cap,
                         struct MrcReport **out);

// Releases a report. NULL is ignored.
//
// # Safety
// `report` must be NULL or a handle from [`mrc_solve`] not yet freed.
void mrc_report_free(struct MrcReport *report);

// Status of the run that produced `report`.
//
// # Safety
// `report` must be NULL or a live handle.
enum MrcStatus mrc_report_status(const struct MrcReport *report);

// Report JSON owned by the handle. Without timings the text depends only
// on the instance and options. NULL for a NULL handle.
//
// # Safety
// `report` must be NULL or a live handle; the result lives as long as it.
const char *mrc_report_json(const struct MrcReport *report, bool with_timings);

// Writes the cut cost. Fails with `Infeasible` when the run produced no cut.
//
// # Safety
// `report` must be NULL or a live handle; `cost` must be NULL or writable.
enum MrcStatus mrc_report_cost(const struct MrcReport *report, double *cost);

// Writes the LP objective. Fails with `Infeasible` when the LP never ran.
//
// # Safety
// `report` must be NULL or a live handle; `objective` must be NULL or writable.
enum MrcStatus mrc_report_lp_objective(const struct MrcReport *report, double *objective);

// Whether the cut passed verification; false for NULL or cut-less runs.
//
// # Safety
// `report` must be NULL or a live handle.
bool mrc_report_feasible(const struct MrcReport *report);

// Copies removed item ids (edges, or vertices for vertex removal) into
// `buf`. `*len` receives the number of ids; if it exceeds `cap`, nothing
// is copied and `BufferTooSmall` is returned. `buf` may be NULL when `cap`
// is 0.
//
// # Safety
// `report` must be NULL or a live handle; `buf` must hold `cap` elements;
// `len` must be NULL or writable.
enum MrcStatus mrc_report_removed(const struct MrcReport *report,
                                  size_t *buf,
                                  size_t cap,
                                  size_t *len);

// Exact optimum by exhaustive search over at most `cap` items. Returns
// `Infeasible` when no cut exists and `InputError` when the instance is
// over the cap.
//
// # Safety
// `instance` must be NULL or a live handle; `cost` must be NULL or writable.
enum MrcStatus mrc_oracle(const struct MrcInstance *instance, size_t cap, double *cost);

#endif  /* MRC_H */
