#ifndef PHOTON_DWELL_H
#define PHOTON_DWELL_H

/* Generated by cbindgen from the photon-dwell-ffi sources. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum PdStatus {
  PD_STATUS_OK = 0,
  PD_STATUS_INVALID_PARAMETER = 1,
  PD_STATUS_DOMAIN = 2,
  PD_STATUS_NUMERIC = 3,
  PD_STATUS_UNSUPPORTED = 4,
  PD_STATUS_UNDEFINED = 5,
  PD_STATUS_ORACLE_BUDGET = 6,
  PD_STATUS_NULL_POINTER = 7,
  PD_STATUS_PANIC = 8,
} PdStatus;

/**
 * Opaque medium handle.
 */
typedef struct PdMedium PdMedium;

/**
 * Opaque pulse handle.
 */
typedef struct PdPulse PdPulse;

/**
 * Delay report; narrow-band-only entries are `NaN` for other pulses.
 */
typedef struct PdDelayReport {
  double p_t;
  double p_s;
  double tau_0;
  double tau_t;
  double tau_s;
  double t_g;
  double t_w;
  double t_s;
  double od_eff;
  /**
   * 0 for the spectral engine, 1 for the time-domain engine.
   */
  uint32_t method;
} PdDelayReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on this thread.
 */
const char *pd_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *pd_version(void);

/**
 * Gaussian pulse of spectral width `sigma` and carrier detuning `detuning`.
 *
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum PdStatus pd_pulse_gaussian(double sigma, double detuning, struct PdPulse **out);

/**
 * Narrow-band (monochromatic) pulse.
 *
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum PdStatus pd_pulse_narrow_band(double detuning, struct PdPulse **out);

/**
 * # Safety
 * `pulse` must be null or a handle from a `pd_pulse_*` constructor that has
 * not been freed.
 */
void pd_pulse_free(struct PdPulse *pulse);

/**
 * Uniform medium with resonant optical depth `od0` over `length`.
 *
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum PdStatus pd_medium_uniform(double od0, double length, struct PdMedium **out);

/**
 * Medium with coupling `g[k]` tabulated at positions `z[k]`, `k < n`.
 *
 * # Safety
 * `z` and `g` must point to `n` readable doubles; `out` must be valid for a
 * pointer write.
 */
enum PdStatus pd_medium_tabulated(double length,
                                  const double *z,
                                  const double *g,
                                  size_t n,
                                  struct PdMedium **out);

/**
 * # Safety
 * `medium` must be null or a live handle from a `pd_medium_*` constructor.
 */
void pd_medium_free(struct PdMedium *medium);

/**
 * Spectral-engine delay report.
 *
 * # Safety
 * `pulse` and `medium` must be live handles; `out` must be writable.
 */
enum PdStatus pd_analyze(const struct PdPulse *pulse,
                         const struct PdMedium *medium,
                         struct PdDelayReport *out);

/**
 * Time-domain delay report on a grid of `cells` spatial cells.
 *
 * # Safety
 * `pulse` and `medium` must be live handles; `out` must be writable.
 */
enum PdStatus pd_analyze_timedomain(const struct PdPulse *pulse,
                                    const struct PdMedium *medium,
                                    size_t cells,
                                    struct PdDelayReport *out);

/**
 * Resonant optical depth of a uniform medium whose transmission of `pulse`
 * is `exp(-od_eff)`.
 *
 * # Safety
 * `pulse` must be a live handle; `out` must be writable.
 */
enum PdStatus pd_od0_for_od_eff(const struct PdPulse *pulse, double od_eff, double *out);

/**
 * Reflected-photon pointer shift of a cavity with input and output mirror
 * rates `gamma1`, `gamma2`.
 *
 * # Safety
 * `pulse` must be a live handle; `out` must be writable.
 */
enum PdStatus pd_cavity_tau_b(double gamma1,
                              double gamma2,
                              const struct PdPulse *pulse,
                              double *out);

/**
 * Average intracavity dwell time.
 *
 * # Safety
 * `pulse` must be a live handle; `out` must be writable.
 */
enum PdStatus pd_cavity_dwell(double gamma1,
                              double gamma2,
                              const struct PdPulse *pulse,
                              double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PHOTON_DWELL_H */
