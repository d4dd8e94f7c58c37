#ifndef DITSP_H
#define DITSP_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DitspAlgo {
  DITSP_ALGO_SGS = 0,
  DITSP_ALGO_RECBTA = 1,
  DITSP_ALGO_RECCCA = 2,
} DitspAlgo;

typedef enum DitspPolicy {
  DITSP_POLICY_BTA = 0,
  DITSP_POLICY_CCA = 1,
} DitspPolicy;

typedef enum DitspStatus {
  DITSP_STATUS_OK = 0,
  DITSP_STATUS_NULL_POINTER = 1,
  DITSP_STATUS_DOMAIN = 2,
  DITSP_STATUS_CONFIG = 3,
  DITSP_STATUS_UNSTABLE = 4,
  DITSP_STATUS_IO = 5,
  DITSP_STATUS_PANIC = 6,
} DitspStatus;

typedef struct DitspPointSet DitspPointSet;

typedef struct DitspTour DitspTour;

/**
 * Box `[0,w]×[0,h]`, or `[0,w]×[0,h]×[0,d]` when `dim` is 3.
 */
typedef struct DitspWorkspace {
  uint32_t dim;
  double w;
  double h;
  double d;
} DitspWorkspace;

/**
 * Speed bound and control bound of the vehicle.
 */
typedef struct DitspVehicle {
  double r_vel;
  double r_ctr;
} DitspVehicle;

typedef struct DitspTourSummary {
  size_t n;
  double total_time;
  double total_length;
  size_t leftover_after_phases;
  size_t phase_count;
  /**
   * Length of the first recursive phase, 0 for STOP-GO-STOP.
   */
  double first_phase_length;
} DitspTourSummary;

typedef struct DitspDtrpSummary {
  double mean_system_time;
  double mean_queue_len;
  double little_residual;
  uint64_t served;
  uint64_t arrivals;
  uint32_t sweeps;
  bool divergent;
} DitspDtrpSummary;

typedef struct DitspBounds {
  double tour_lower;
  double tour_upper;
  double dtrp_lower;
  double dtrp_lower_printed;
  double dtrp_upper;
  double dtrp_upper_printed;
  double dtrp_upper_constant;
} DitspBounds;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the next failing call.
 */
const char *ditsp_last_error(void);

/**
 * Static, NUL-terminated version string.
 */
const char *ditsp_version(void);

/**
 * Builds a point set from `n` points stored as `n*dim` coordinates.
 *
 * # Safety
 * `coords` must point to `n*ws.dim` doubles and `out` must be writable.
 */
enum DitspStatus ditsp_pointset_new(struct DitspWorkspace ws,
                                    const double *coords,
                                    size_t n,
                                    struct DitspPointSet **out_set);

/**
 * `n` i.i.d. uniform points, deterministic in `seed`.
 *
 * # Safety
 * `out_set` must be writable.
 */
enum DitspStatus ditsp_pointset_uniform(struct DitspWorkspace ws,
                                        size_t n,
                                        uint64_t seed,
                                        struct DitspPointSet **out_set);

/**
 * Number of points, 0 for null.
 *
 * # Safety
 * `set` must be null or a live handle.
 */
size_t ditsp_pointset_len(const struct DitspPointSet *set);

/**
 * # Safety
 * `set` must be null or a handle not yet freed.
 */
void ditsp_pointset_free(struct DitspPointSet *set);

/**
 * Plans a closed tour through every point.
 *
 * # Safety
 * `set` must be a live handle and `out_tour` writable.
 */
enum DitspStatus ditsp_plan(const struct DitspPointSet *set,
                            enum DitspAlgo algo,
                            struct DitspVehicle params,
                            uint64_t seed,
                            struct DitspTour **out_tour);

/**
 * # Safety
 * `tour` must be a live handle and `out_summary` writable.
 */
enum DitspStatus ditsp_tour_summary(const struct DitspTour *tour,
                                    struct DitspTourSummary *out_summary);

/**
 * Copies up to `cap` visited point indices into `buf`; `written` receives the full count.
 *
 * # Safety
 * `buf` must hold `cap` entries (may be null when `cap` is 0); `written` must be writable.
 */
enum DitspStatus ditsp_tour_visit_order(const struct DitspTour *tour,
                                        size_t *buf,
                                        size_t cap,
                                        size_t *written);

/**
 * # Safety
 * `tour` must be null or a handle not yet freed.
 */
void ditsp_tour_free(struct DitspTour *tour);

/**
 * Runs the dynamic service policy for `horizon_sweeps` sweep periods.
 *
 * # Safety
 * `out_summary` must be writable.
 */
enum DitspStatus ditsp_dtrp_run(enum DitspPolicy policy,
                                double lambda,
                                struct DitspWorkspace ws,
                                struct DitspVehicle params,
                                uint32_t horizon_sweeps,
                                uint64_t seed,
                                struct DitspDtrpSummary *out_summary);

/**
 * Tour bounds for `n` targets and DTRP system-time coefficients.
 *
 * # Safety
 * `out_bounds` must be writable.
 */
enum DitspStatus ditsp_bounds(struct DitspWorkspace ws,
                              struct DitspVehicle params,
                              size_t n,
                              struct DitspBounds *out_bounds);

/**
 * Minimum time to travel `delta` from rest to rest.
 *
 * # Safety
 * `out_time` must be writable.
 */
enum DitspStatus ditsp_stop_go_time(double delta, struct DitspVehicle params, double *out_time);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DITSP_H */
