#ifndef NGSL_H
#define NGSL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NgslChannel {
  NGSL_CHANNEL_SENSE = 0,
  NGSL_CHANNEL_CARRY = 1,
} NgslChannel;

typedef enum NgslDirection {
  NGSL_DIRECTION_INFALL = 0,
  NGSL_DIRECTION_EMISSION = 1,
} NgslDirection;

typedef enum NgslLedgerMode {
  NGSL_LEDGER_MODE_DIFFERENTIAL = 0,
  NGSL_LEDGER_MODE_EXACT = 1,
} NgslLedgerMode;

typedef enum NgslStatus {
  NGSL_STATUS_OK = 0,
  NGSL_STATUS_NULL_POINTER = 1,
  NGSL_STATUS_INVALID_ARGUMENT = 2,
  NGSL_STATUS_INSIDE_HORIZON = 3,
  NGSL_STATUS_BELOW_FLOOR = 4,
  NGSL_STATUS_COMPLEMENTARITY_VIOLATION = 5,
  NGSL_STATUS_STIFFNESS = 6,
  NGSL_STATUS_INDEX_OUT_OF_RANGE = 7,
  NGSL_STATUS_PANIC = 99,
} NgslStatus;

typedef enum NgslStopReason {
  NGSL_STOP_REASON_REACHED_END = 0,
  NGSL_STOP_REASON_MASS_FLOOR = 1,
  NGSL_STOP_REASON_EVENT_BELOW_FLOOR = 2,
} NgslStopReason;

/**
 * Opaque ledger entry.
 */
typedef struct NgslLedgerEntry NgslLedgerEntry;

/**
 * Opaque integrated trajectory.
 */
typedef struct NgslTrajectory NgslTrajectory;

typedef struct NgslTransit {
  double time;
  double particle_mass;
  enum NgslDirection direction;
} NgslTransit;

typedef struct NgslSample {
  double t;
  double mass;
  double temperature;
  double entropy;
  double information;
  double shell_mass;
  double cumulative_budget;
  int8_t event_flag;
} NgslSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *ngsl_last_error_message(void);

void ngsl_clear_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ngsl_version(void);

/**
 * # Safety
 * `out` must be valid for a write of one `double`.
 */
enum NgslStatus ngsl_hawking_temperature(double mass, double *out);

/**
 * # Safety
 * `out` must be valid for a write of one `double`.
 */
enum NgslStatus ngsl_entropy(double mass, double *out);

/**
 * M / T_H.
 *
 * # Safety
 * `out` must be valid for a write of one `double`.
 */
enum NgslStatus ngsl_gravitational_information(double mass, double *out);

/**
 * Screen temperature at areal radius `r`; `r == 0` selects the horizon.
 *
 * # Safety
 * `out` must be valid for a write of one `double`.
 */
enum NgslStatus ngsl_screen_temperature(double mass, double r, double *out);

/**
 * m / T_hs for a marked mass `m` at radius `r` (`r == 0`: horizon).
 *
 * # Safety
 * `out` must be valid for a write of one `double`.
 */
enum NgslStatus ngsl_marked_information(double m, double mass, double r, double *out);

/**
 * −8π·M_s·dM.
 *
 * # Safety
 * `out` must be valid for a write of one `double`.
 */
enum NgslStatus ngsl_channel_width_bound(double shell_mass, double dm, double *out);

/**
 * Bound minus `di`; negative means the transit violates the bound.
 *
 * # Safety
 * `out` must be valid for a write of one `double`.
 */
enum NgslStatus ngsl_shell_residual(double shell_mass, double dm, double di, double *out);

/**
 * M0³ / (3 alpha).
 *
 * # Safety
 * `out` must be valid for a write of one `double`.
 */
enum NgslStatus ngsl_analytic_lifetime(double m0, double alpha, double *out);

/**
 * Apply one transit to a hole of mass `mass`.
 *
 * # Safety
 * `event` must point to a valid `NgslTransit`; `out_entry` and `out_mass`
 * must be valid for writes. The returned entry is owned by the caller.
 */
enum NgslStatus ngsl_apply_event(double mass,
                                 const struct NgslTransit *event,
                                 enum NgslLedgerMode ledger_mode,
                                 double mass_floor,
                                 struct NgslLedgerEntry **out_entry,
                                 double *out_mass);

/**
 * Read one information channel. Reading the other channel of the same entry
 * afterwards fails with `ComplementarityViolation`.
 *
 * # Safety
 * `entry` must come from `ngsl_apply_event` and not be freed; `out` must be
 * valid for a write of one `double`.
 */
enum NgslStatus ngsl_ledger_entry_observe(struct NgslLedgerEntry *entry,
                                          enum NgslChannel which,
                                          double *out);

/**
 * dS − dI for a channel, without counting as an observation.
 *
 * # Safety
 * `entry` must be a live handle; `out` must be valid for a write.
 */
enum NgslStatus ngsl_ledger_entry_balance(const struct NgslLedgerEntry *entry,
                                          enum NgslChannel which,
                                          double *out);

/**
 * Black-hole entropy change booked by the entry.
 *
 * # Safety
 * `entry` must be a live handle; `out` must be valid for a write.
 */
enum NgslStatus ngsl_ledger_entry_entropy_change(const struct NgslLedgerEntry *entry, double *out);

/**
 * # Safety
 * `entry` must be NULL or a handle from `ngsl_apply_event` not yet freed.
 */
void ngsl_ledger_entry_free(struct NgslLedgerEntry *entry);

/**
 * Integrate evaporation from `m0` with the given transits, sorted by time.
 *
 * `mass_floor`, `t_end` and `shell_mass` take their defaults when `<= 0`;
 * `t_end` is required when `alpha == 0`.
 * A positive `shell_mass` fixes the shell mass; otherwise the default disk
 * profile is used.
 *
 * # Safety
 * `events` must point to `n_events` valid transits (or be NULL when
 * `n_events == 0`); `out` must be valid for a write. The returned trajectory
 * is owned by the caller.
 */
enum NgslStatus ngsl_integrate(double m0,
                               double alpha,
                               double mass_floor,
                               double t_end,
                               double shell_mass,
                               const struct NgslTransit *events,
                               size_t n_events,
                               struct NgslTrajectory **out);

/**
 * # Safety
 * `traj` must be a live handle; `out` must be valid for a write.
 */
enum NgslStatus ngsl_trajectory_len(const struct NgslTrajectory *traj, size_t *out);

/**
 * # Safety
 * `traj` must be a live handle; `out` must be valid for a write.
 */
enum NgslStatus ngsl_trajectory_sample(const struct NgslTrajectory *traj,
                                       size_t index,
                                       struct NgslSample *out);

/**
 * # Safety
 * `traj` must be a live handle; `out` must be valid for a write.
 */
enum NgslStatus ngsl_trajectory_stop_reason(const struct NgslTrajectory *traj,
                                            enum NgslStopReason *out);

/**
 * Cumulative channel budget: per-transit bounds plus the continuous share.
 *
 * # Safety
 * `traj` must be a live handle; `out` must be valid for a write.
 */
enum NgslStatus ngsl_trajectory_budget(const struct NgslTrajectory *traj, double *out);

/**
 * # Safety
 * `traj` must be NULL or a handle from `ngsl_integrate` not yet freed.
 */
void ngsl_trajectory_free(struct NgslTrajectory *traj);

/**
 * dS − dI and the mutual information of the uniform binary engine with
 * measurement error `error_rate` under the optimal protocol.
 *
 * # Safety
 * `out_margin` must be valid for a write; `out_information` may be NULL.
 */
enum NgslStatus ngsl_szilard_margin(double error_rate,
                                    double bath_temperature,
                                    double *out_margin,
                                    double *out_information);

/**
 * dS − dI for an `n`-state model with an explicit row-major work table
 * `work[x * n + y]`.
 *
 * # Safety
 * `prior` must point to `n` doubles and `work` to `n * n` doubles;
 * `out_margin` must be valid for a write; `out_information` may be NULL.
 */
enum NgslStatus ngsl_demon_margin(const double *prior,
                                  size_t n,
                                  double error_rate,
                                  double bath_temperature,
                                  const double *work,
                                  double *out_margin,
                                  double *out_information);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* NGSL_H */
