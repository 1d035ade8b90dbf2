#ifndef NHSIM_H
#define NHSIM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NhsimStatus {
  NHSIM_STATUS_OK = 0,
  NHSIM_STATUS_NULL_POINTER = 1,
  // Bad parameters, inadmissible state, unknown config key and so on.
  NHSIM_STATUS_INVALID_INPUT = 2,
  NHSIM_STATUS_PARSE = 3,
  // Rank-deficient constraints or a vanishing closed-form denominator.
  NHSIM_STATUS_SINGULAR = 4,
  NHSIM_STATUS_NO_CONVERGENCE = 5,
  // Any other numerical failure.
  NHSIM_STATUS_NUMERICAL = 6,
  NHSIM_STATUS_PANIC = 7,
} NhsimStatus;

typedef enum NhsimRetraction {
  NHSIM_RETRACTION_EXP = 0,
  NHSIM_RETRACTION_CAY = 1,
  NHSIM_RETRACTION_CCSK = 2,
} NhsimRetraction;

// Opaque model handle.
typedef struct NhsimModel NhsimModel;

// Opaque table of simulation output.
typedef struct NhsimTrajectory NhsimTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failure on this thread, or null. The pointer stays
// valid until the next failing call on the same thread.
const char *nhsim_last_error_message(void);

// Static description of a status code.
const char *nhsim_status_name(enum NhsimStatus status);

// Chaplygin sleigh with inertia `I`, mass `m` and skate offset `a`.
//
// # Safety
// `out` must be valid for one pointer write.
enum NhsimStatus nhsim_sleigh_new(double inertia,
                                  double mass,
                                  double offset,
                                  struct NhsimModel **out);

// Snakeboard with mass `m`, half length `l`, board inertia `I` and wheel
// inertia `J`.
//
// # Safety
// `out` must be valid for one pointer write.
enum NhsimStatus nhsim_snakeboard_new(double mass,
                                      double half_length,
                                      double inertia,
                                      double rotor_inertia,
                                      struct NhsimModel **out);

// # Safety
// `model` must be null or a handle not yet freed.
void nhsim_model_free(struct NhsimModel *model);

// Configuration dimension `n`; 0 for a null handle.
//
// # Safety
// `model` must be null or a live handle.
size_t nhsim_model_dim(const struct NhsimModel *model);

// Number of constraints `m`.
//
// # Safety
// `model` must be null or a live handle.
size_t nhsim_model_num_constraints(const struct NhsimModel *model);

// Length of the control vector `u`; 0 for the sleigh.
//
// # Safety
// `model` must be null or a live handle.
size_t nhsim_model_num_controls(const struct NhsimModel *model);

// Writes the n×n projectors P(q) and Q(q), either of which may be null.
//
// # Safety
// `q` holds `n` doubles; non-null outputs hold `n*n`.
enum NhsimStatus nhsim_projectors(const struct NhsimModel *model,
                                  const double *q,
                                  double *p_out,
                                  double *q_out);

// First half-step momentum `p_{1/2}` from an admissible `(q0, p0)`.
//
// # Safety
// `q0`, `p0` and `p_half_out` hold `n` doubles, `u0` holds the control
// count (may be null when that is 0).
enum NhsimStatus nhsim_gni_init(const struct NhsimModel *model,
                                const double *q0,
                                const double *p0,
                                const double *u0,
                                double h,
                                double *p_half_out);

// One projected GNI step `(q_k, p_{k-1/2}) -> (q_{k+1}, p_{k+1/2})` with
// the control evaluated at `t_k`.
//
// # Safety
// `q`, `p_half`, `q_next` and `p_half_next` hold `n` doubles; `u` holds
// the control count (may be null when that is 0).
enum NhsimStatus nhsim_gni_step(const struct NhsimModel *model,
                                const double *q,
                                const double *p_half,
                                const double *u,
                                double h,
                                double *q_next,
                                double *p_half_next);

// Maps `v = (w, x, y)` in se(2) to `g = (theta, x, y)` in SE(2).
//
// # Safety
// `v` and `g_out` each hold 3 doubles.
enum NhsimStatus nhsim_se2_retract(enum NhsimRetraction kind, const double *v, double *g_out);

// Parses a run configuration and simulates it.
//
// On a numerical failure mid-run the status reports it but `*out` still
// receives the rows completed so far. On input errors `*out` is null.
//
// # Safety
// `config` is a NUL-terminated UTF-8 string; `out` is valid for one
// pointer write.
enum NhsimStatus nhsim_simulate_config(const char *config, struct NhsimTrajectory **out);

// # Safety
// `traj` must be null or a handle not yet freed.
void nhsim_trajectory_free(struct NhsimTrajectory *traj);

// # Safety
// `traj` must be null or a live handle.
size_t nhsim_trajectory_rows(const struct NhsimTrajectory *traj);

// # Safety
// `traj` must be null or a live handle.
size_t nhsim_trajectory_cols(const struct NhsimTrajectory *traj);

// Column name, or null when out of range. Owned by the trajectory.
//
// # Safety
// `traj` must be null or a live handle.
const char *nhsim_trajectory_column_name(const struct NhsimTrajectory *traj, size_t col);

// Row-major `rows × cols` values, owned by the trajectory. Null when empty.
//
// # Safety
// `traj` must be null or a live handle.
const double *nhsim_trajectory_data(const struct NhsimTrajectory *traj);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NHSIM_H */
