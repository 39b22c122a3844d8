#ifndef CVDISC_H
#define CVDISC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CvdStatus {
  CVD_STATUS_OK = 0,
  CVD_STATUS_DOMAIN = 1,
  CVD_STATUS_NUMERICAL = 2,
  CVD_STATUS_CONVERGENCE = 3,
  CVD_STATUS_REPORT_FAILURE = 4,
  CVD_STATUS_INVARIANT = 5,
  CVD_STATUS_NULL_POINTER = 6,
  CVD_STATUS_IO = 7,
  CVD_STATUS_PANIC = 8,
} CvdStatus;

/**
 * Opaque single-point report.
 */
typedef struct CvdReport CvdReport;

/**
 * Opaque sweep table.
 */
typedef struct CvdSweep CvdSweep;

/**
 * Plain copy of one report row. `ratio_db` is NaN at `mu = 1`.
 */
typedef struct CvdReportValues {
  double mu;
  double delta_c;
  double delta_d;
  double p_plus_global;
  double p_minus_global;
  double p_plus_local;
  double p_minus_local;
  double i_plus_global;
  double i_minus_global;
  double i_plus_local;
  double i_minus_local;
  double kappa;
  double kappa_loc;
  double delta;
  double ratio_db;
} CvdReportValues;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer is
 * valid until the next call into this library from the same thread.
 */
const char *cvd_last_error(void);

/**
 * Static description of a status code.
 */
const char *cvd_status_string(enum CvdStatus status);

/**
 * Gaussian discord (bits) of the maximally correlated state.
 *
 * # Safety
 * Non-null out pointers must be writable and handles must be live.
 */
enum CvdStatus cvd_delta_d(double mu, double *out);

/**
 * Classical correlations (bits) of the maximally correlated state.
 *
 * # Safety
 * Non-null out pointers must be writable and handles must be live.
 */
enum CvdStatus cvd_delta_c(double mu, double *out);

/**
 * Global s-overlap `Tr(rho0^s rho1^(1-s))`.
 *
 * # Safety
 * Non-null out pointers must be writable and handles must be live.
 */
enum CvdStatus cvd_s_overlap_global(double mu, double s, double *out);

/**
 * Heterodyne-averaged s-overlap of the local detector.
 *
 * # Safety
 * Non-null out pointers must be writable and handles must be live.
 */
enum CvdStatus cvd_s_overlap_local(double mu, double s, double *out);

/**
 * Minimized global overlap and its minimizer.
 *
 * # Safety
 * Non-null out pointers must be writable and handles must be live.
 */
enum CvdStatus cvd_qcb_global(double mu, double *q_out, double *s_out);

/**
 * Computes every bound at `mu`. Free the handle with [`cvd_report_free`].
 *
 * # Safety
 * Non-null out pointers must be writable and handles must be live.
 */
enum CvdStatus cvd_report_new(double mu, struct CvdReport **out);

/**
 * # Safety
 * Non-null out pointers must be writable and handles must be live.
 */
enum CvdStatus cvd_report_values(const struct CvdReport *report, struct CvdReportValues *out);

/**
 * Releases a report; NULL is ignored.
 *
 * # Safety
 * Non-null out pointers must be writable and handles must be live.
 */
void cvd_report_free(struct CvdReport *report);

/**
 * Computes a sweep over `points` values of mu, log-spaced when
 * `log_spacing` is true. Free the handle with [`cvd_sweep_free`].
 *
 * # Safety
 * Non-null out pointers must be writable and handles must be live.
 */
enum CvdStatus cvd_sweep_new(double mu_min,
                             double mu_max,
                             size_t points,
                             bool log_spacing,
                             struct CvdSweep **out);

/**
 * # Safety
 * Non-null out pointers must be writable and handles must be live.
 */
enum CvdStatus cvd_sweep_len(const struct CvdSweep *table, size_t *out);

/**
 * # Safety
 * Non-null out pointers must be writable and handles must be live.
 */
enum CvdStatus cvd_sweep_row(const struct CvdSweep *table,
                             size_t index,
                             struct CvdReportValues *out);

/**
 * Writes the sweep as CSV to the UTF-8 path `path`.
 *
 * # Safety
 * Non-null out pointers must be writable and handles must be live.
 */
enum CvdStatus cvd_sweep_write_csv(const struct CvdSweep *table, const char *path);

/**
 * Releases a sweep; NULL is ignored.
 *
 * # Safety
 * Non-null out pointers must be writable and handles must be live.
 */
void cvd_sweep_free(struct CvdSweep *table);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CVDISC_H */
