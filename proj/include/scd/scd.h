/* Copyright 2026 the scd authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the scd streaming changepoint-detection library.
 *
 * All functions reporting failure write a message into the caller-supplied
 * error buffer (truncated to err_cap, always NUL-terminated) and return
 * SCD_ERROR or NULL. Detector handles are single-owner and not thread-safe;
 * distinct handles may be used concurrently.
 */
#ifndef SCD_SCD_H
#define SCD_SCD_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#define SCD_OK 0
#define SCD_ERROR 1
#define SCD_ALARM 2

typedef struct scd_detector scd_detector;

const char* scd_version(void);

/* config_json: {"alpha":0.01,"family":"gaussian_mean","detector":"bcs",
 *               "sidedness":"two_sided","check_frequency":1,
 *               "max_steps":1000000,"known_theta0":null,"mmd_bandwidth":null}
 * family: gaussian_mean | bounded_mean | ks_cdf | mmd_pair */
scd_detector* scd_detector_create(const char* config_json, char* err,
                                  size_t err_cap);
void scd_detector_destroy(scd_detector* d);

/* Returns SCD_OK (still running), SCD_ALARM (stopped), or SCD_ERROR. */
int scd_detector_step_scalar(scd_detector* d, double x, char* err,
                             size_t err_cap);
int scd_detector_step_pair(scd_detector* d, const double* u, const double* v,
                           size_t dim, char* err, size_t err_cap);

long long scd_detector_step_count(const scd_detector* d);

/* After an alarm: writes {"event":"alarm","tau":n,"t_hat":...,"eps_hat":...} */
int scd_detector_report_json(const scd_detector* d, char* out, size_t out_cap,
                             char* err, size_t err_cap);

/* Parses one input line: a decimal scalar, or "u1,u2,..|v1,v2,.." for a pair.
 * Sets *is_pair; fills *x, or u/v (up to cap entries) and *dim. */
int scd_parse_line(const char* line, size_t line_no, int* is_pair, double* x,
                   double* u, double* v, size_t cap, size_t* dim, char* err,
                   size_t err_cap);

/* Batch commands: simulate | pfa | arl | delay-curve | t-probe | certificate.
 * Writes the per-trial CSV to csv_path when given (certificate writes none)
 * and a one-object JSON summary into `summary`. no_timestamp suppresses the
 * timestamp header line in the CSV. */
int scd_run(const char* command, const char* config_json, const char* csv_path,
            int no_timestamp, char* summary, size_t summary_cap, char* err,
            size_t err_cap);

#ifdef __cplusplus
}
#endif

#endif
