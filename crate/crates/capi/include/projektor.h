/* C interface of the projektor library.
 *
 * Conventions:
 *  - Handles are opaque; free them with the matching *_free exactly once.
 *  - Fallible calls return PjStatus; on failure a thread-local message is
 *    readable through pj_last_error.
 *  - Vectors and matrices are dense double buffers; matrices column-major.
 *  - Subspace indices and word letters are 1-based.
 *
 * Kept in sync with crates/capi/src/lib.rs by a test.
 */

#ifndef PROJEKTOR_H
#define PROJEKTOR_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum PjStatus {
  PJ_STATUS_OK = 0,
  PJ_STATUS_INPUT_ERROR = 1,
  PJ_STATUS_EMPTY_SUBSPACE = 2,
  PJ_STATUS_EMPTY = 3,
  PJ_STATUS_ZERO_NORM = 4,
  PJ_STATUS_PRECONDITION_VIOLATED = 5,
  PJ_STATUS_CONSTRUCTION_FAILED = 6,
  PJ_STATUS_CHAIN_DEGRADED = 7,
  PJ_STATUS_MISMATCH = 8,
  PJ_STATUS_IO = 9,
  PJ_STATUS_JSON = 10,
  PJ_STATUS_NULL_POINTER = 11,
  PJ_STATUS_BUFFER_TOO_SMALL = 12,
  PJ_STATUS_UTF8 = 13,
  PJ_STATUS_PANIC = 14,
} PjStatus;

/* Schedule kinds for pj_run_trajectory. */
#define PJ_SCHEDULE_CYCLIC 0
#define PJ_SCHEDULE_SEEDED_RANDOM 1
#define PJ_SCHEDULE_EXPLICIT 2

/* Opaque handles. */
typedef struct PjSubspace PjSubspace;
typedef struct PjTrajectory PjTrajectory;

/* Version string (static, NUL-terminated). */
const char *pj_version(void);

/* Copy the last error message (NUL-terminated, truncated to cap). Returns
 * the full length including the terminator. buf may be NULL to query. */
size_t pj_last_error(char *buf, size_t cap);

/* --- Subspaces --------------------------------------------------------- */

/* Orthonormalize `count` vectors of length `ambient_dim` (contiguous,
 * vector by vector) into a new handle. */
PjStatus pj_subspace_span(const double *data, size_t ambient_dim, size_t count,
                          double tol, PjSubspace **out);

void pj_subspace_free(PjSubspace *s);

size_t pj_subspace_ambient_dim(const PjSubspace *s);
size_t pj_subspace_dim(const PjSubspace *s);

/* Copy the orthonormal basis (column-major, ambient_dim x dim). */
PjStatus pj_subspace_basis(const PjSubspace *s, double *out, size_t cap);

/* Orthogonal projection of x (ambient_dim doubles) into out. */
PjStatus pj_subspace_project(const PjSubspace *s, const double *x, double *out);

/* Distance from x to the subspace. */
PjStatus pj_subspace_distance(const PjSubspace *s, const double *x, double *out);

PjStatus pj_subspace_join(const PjSubspace *a, const PjSubspace *b,
                          PjSubspace **out);
PjStatus pj_subspace_intersect(const PjSubspace *a, const PjSubspace *b,
                               double tol, PjSubspace **out);
PjStatus pj_subspace_complement(const PjSubspace *s, PjSubspace **out);

/* Principal angles (ascending), Friedrichs cosine, and shared-direction
 * count for a pair of nonzero subspaces. */
PjStatus pj_principal_angles(const PjSubspace *a, const PjSubspace *b,
                             double tol, double *angles_out, size_t angles_cap,
                             size_t *angles_len, double *friedrichs_out,
                             size_t *dim_intersection_out);

/* Witness gap of a family and the witness's largest member distance. */
PjStatus pj_witness_gap(const PjSubspace *const *spaces, size_t count,
                        double *gap_out, double *max_dist_out);

/* --- Trajectories ------------------------------------------------------ */

/* Run z_n = P(L_{k_n}) z_{n-1}. For PJ_SCHEDULE_EXPLICIT, `explicit_indices`
 * holds `explicit_len` 1-based indices; otherwise pass NULL/0. */
PjStatus pj_run_trajectory(const PjSubspace *const *spaces, size_t count,
                           int32_t schedule_kind, uint64_t seed,
                           const size_t *explicit_indices, size_t explicit_len,
                           const double *z0, size_t steps, PjTrajectory **out);

void pj_trajectory_free(PjTrajectory *t);
size_t pj_trajectory_steps(const PjTrajectory *t);

/* Norm of z_step; step 0 is the start point. */
PjStatus pj_trajectory_norm(const PjTrajectory *t, size_t step, double *out);

/* 1-based subspace index applied at step (1-based). */
PjStatus pj_trajectory_index(const PjTrajectory *t, size_t step, size_t *out);

/* --- Transport --------------------------------------------------------- */

/* Closed-form ladder residual 1 - cos^M(pi/2M); NaN for m = 0. */
double pj_ladder_residual(size_t m);

/* Smallest ladder size whose residual is strictly below epsilon. */
PjStatus pj_minimal_ladder_size(double epsilon, size_t *out);

/* --- Experiments ------------------------------------------------------- */

/* Run an experiment spec (JSON file); optional output-directory override.
 * Returns the exit code: 0 success, 1 bad input, 2 construction failure. */
int32_t pj_run_experiment(const char *config_path, const char *out_dir);

/* Replay a recorded report.json and byte-compare its CSV outputs.
 * Returns 0 when identical, 1 on bad input, 3 on mismatch. */
int32_t pj_replay(const char *report_path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PROJEKTOR_H */
