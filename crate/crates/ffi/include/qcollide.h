#ifndef QCOLLIDE_H
#define QCOLLIDE_H

/* Generated by cbindgen from qcollide-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible entry point.
 */
typedef enum QcStatus {
  QC_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  QC_STATUS_NULL_ARGUMENT = 1,
  /**
   * A parameter was outside its legal range or otherwise malformed.
   */
  QC_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The requested register exceeds the 10-qubit cap.
   */
  QC_STATUS_CAPACITY_EXCEEDED = 3,
  /**
   * A state stopped satisfying the density-matrix invariants mid-run.
   */
  QC_STATUS_INTEGRITY_ERROR = 4,
} QcStatus;

/**
 * Opaque simulation configuration handle.
 */
typedef struct QcConfig QcConfig;

/**
 * Opaque trajectory handle.
 */
typedef struct QcTrajectory QcTrajectory;

/**
 * Observables of one collision step.
 */
typedef struct QcStepRecord {
  /**
   * Collision index; 0 is the pre-collision baseline.
   */
  uint64_t n;
  /**
   * Trace distance between the evolving pair members.
   */
  double d;
  /**
   * Increment of the trace distance against the previous step.
   */
  double dd;
  /**
   * System coherence |<0|rho_S|1>|.
   */
  double c_s;
  /**
   * Coherence of the next ancilla in line.
   */
  double c_r;
  /**
   * Excited-state population of the system.
   */
  double pop_s;
} QcStepRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *qc_version(void);

/**
 * Static description of a status code.
 */
const char *qc_status_message(enum QcStatus status);

/**
 * Create a direct-model config: system-ancilla coupling `j`, intracollision
 * strength `omega`, dimensionless temperature `t`, frequency ratio
 * `omega_ratio` (5.0 is the conventional choice). Stop policy defaults to
 * 3000 collisions with a 50-step settle window at 1e-7.
 *
 * # Safety
 * `out` must be a valid pointer to a `QcConfig*` slot.
 */
enum QcStatus qc_config_direct_new(double j,
                                   double omega,
                                   double t,
                                   double omega_ratio,
                                   struct QcConfig **out);

/**
 * Create an indirect-model config; `kappa` couples the system to the
 * intermediate memory qubit, `j` the memory qubit to the chain.
 *
 * # Safety
 * `out` must be a valid pointer to a `QcConfig*` slot.
 */
enum QcStatus qc_config_indirect_new(double kappa,
                                     double j,
                                     double omega,
                                     double t,
                                     double omega_ratio,
                                     struct QcConfig **out);

/**
 * Replace the stop policy of a config. Requires
 * `n_max >= settle_window >= 1` and `eps_settle > 0`.
 *
 * # Safety
 * `config` must be a live handle from one of the constructors.
 */
enum QcStatus qc_config_set_stop(struct QcConfig *config,
                                 uint64_t n_max,
                                 double eps_settle,
                                 uint64_t settle_window);

/**
 * Release a config handle. Null is a no-op.
 *
 * # Safety
 * `config` must be null or a handle not yet freed.
 */
void qc_config_free(struct QcConfig *config);

/**
 * Evolve the optimal state pair under the configured model until the stop
 * policy fires, delivering a trajectory handle.
 *
 * # Safety
 * `config` must be a live handle; `out` a valid `QcTrajectory*` slot.
 */
enum QcStatus qc_run(const struct QcConfig *config, struct QcTrajectory **out);

/**
 * Replay `collisions` steps through the iterative engine and the full-chain
 * reference route, writing the worst per-record deviation to `out_deviation`.
 * The register cap limits `collisions` to 8 (direct) or 7 (indirect).
 *
 * # Safety
 * `config` must be a live handle; `out_deviation` a valid double slot.
 */
enum QcStatus qc_oracle_deviation(const struct QcConfig *config,
                                  uint64_t collisions,
                                  double *out_deviation);

/**
 * Number of records in a trajectory (collisions + 1 baseline); 0 for null.
 *
 * # Safety
 * `trajectory` must be null or a live handle.
 */
uint64_t qc_trajectory_len(const struct QcTrajectory *trajectory);

/**
 * Whether the run settled before hitting its step cap; false for null.
 *
 * # Safety
 * `trajectory` must be null or a live handle.
 */
bool qc_trajectory_converged(const struct QcTrajectory *trajectory);

/**
 * Copy record `index` into `out`.
 *
 * # Safety
 * `trajectory` must be a live handle; `out` a valid record slot.
 */
enum QcStatus qc_trajectory_record(const struct QcTrajectory *trajectory,
                                   uint64_t index,
                                   struct QcStepRecord *out);

/**
 * Sum the positive trace-distance increments of a trajectory into `out`.
 *
 * # Safety
 * `trajectory` must be a live handle; `out` a valid double slot.
 */
enum QcStatus qc_trajectory_backflow(const struct QcTrajectory *trajectory, double *out);

/**
 * Release a trajectory handle. Null is a no-op.
 *
 * # Safety
 * `trajectory` must be null or a handle not yet freed.
 */
void qc_trajectory_free(struct QcTrajectory *trajectory);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QCOLLIDE_H */
