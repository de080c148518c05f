#ifndef WARPSPEC_H
#define WARPSPEC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Transform flavor for [`ws_warped_forward`].
 */
typedef enum WsMethod {
  WS_METHOD_DIRECT_QUADRATURE = 0,
  WS_METHOD_RESAMPLE_FFT = 1,
} WsMethod;

/**
 * Status codes. `Ok` is zero; everything else is a failure.
 */
typedef enum WsStatus {
  WS_STATUS_OK = 0,
  WS_STATUS_NULL_POINTER = 1,
  WS_STATUS_PANIC = 2,
  WS_STATUS_UNKNOWN_FAMILY = 10,
  WS_STATUS_NON_MONOTONE_PARAMETERS = 11,
  WS_STATUS_NON_POSITIVE_G = 12,
  WS_STATUS_GRID_TOO_COARSE = 20,
  WS_STATUS_GRID_MISMATCH = 21,
  WS_STATUS_NON_MONOTONE_WARP = 22,
  WS_STATUS_RESAMPLE_OUT_OF_RANGE = 23,
  WS_STATUS_NYQUIST_VIOLATION = 30,
  WS_STATUS_RANGE_TOO_NARROW = 31,
  WS_STATUS_BAD_POTENTIAL = 40,
  WS_STATUS_CONVERGENCE_FAILURE = 41,
  WS_STATUS_LINEAR_SOLVE_FAILURE = 42,
  WS_STATUS_INVALID_GRID = 50,
  WS_STATUS_INVALID_INPUT = 51,
  WS_STATUS_INSUFFICIENT_RUNS = 60,
  WS_STATUS_CONFIG_PARSE = 61,
  WS_STATUS_IO = 62,
} WsStatus;

/**
 * Opaque complex signal on a uniform time grid.
 */
typedef struct WsSignal WsSignal;

/**
 * Opaque complex spectrum on a uniform energy grid.
 */
typedef struct WsSpectrum WsSpectrum;

/**
 * Opaque warp handle.
 */
typedef struct WsWarp WsWarp;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf` (NUL-terminated, truncated
 * to `len`). Returns the full message length in bytes, or 0 if there is none.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t ws_last_error_message(char *buf, size_t len);

/**
 * Analytic warp by family name (`identity`, `linear-scale`, `chirp`, `sin-perturbed`,
 * `exp-rate`, `zero`).
 *
 * # Safety
 * `name` must be a NUL-terminated string, `params` must hold `n_params` doubles, and
 * `out` must be writable.
 */
enum WsStatus ws_warp_analytic(const char *name,
                               const double *params,
                               size_t n_params,
                               struct WsWarp **out);

/**
 * Warp from `n` samples of `g` on `[t_min, t_max]`, with `h(t0) = c0`.
 *
 * # Safety
 * `g` must hold `n` doubles and `out` must be writable.
 */
enum WsStatus ws_warp_numeric(double t_min,
                              double t_max,
                              size_t n,
                              const double *g,
                              double t0,
                              double c0,
                              struct WsWarp **out);

/**
 * Evaluates `g(t)` and `h(t)`; either output may be null.
 *
 * # Safety
 * `w` must be a live warp handle.
 */
enum WsStatus ws_warp_eval(const struct WsWarp *w, double t, double *g, double *h);

/**
 * `h⁻¹(u)`.
 *
 * # Safety
 * `w` must be a live warp handle and `out` writable.
 */
enum WsStatus ws_warp_h_inv(const struct WsWarp *w, double u, double *out);

/**
 * # Safety
 * `w` must be null or a handle not yet freed.
 */
void ws_warp_free(struct WsWarp *w);

/**
 * Signal from separate real and imaginary arrays of length `n` on `[t_min, t_max]`.
 * `im` may be null for a real signal.
 *
 * # Safety
 * `re` (and `im` if non-null) must hold `n` doubles; `out` must be writable.
 */
enum WsStatus ws_signal_new(double t_min,
                            double t_max,
                            size_t n,
                            const double *re,
                            const double *im,
                            struct WsSignal **out);

/**
 * Number of samples, or 0 for a null handle.
 *
 * # Safety
 * `s` must be null or a live handle.
 */
size_t ws_signal_len(const struct WsSignal *s);

/**
 * Copies the samples out; `re`/`im` must each hold `ws_signal_len(s)` doubles.
 *
 * # Safety
 * See above.
 */
enum WsStatus ws_signal_copy(const struct WsSignal *s, double *re, double *im);

/**
 * # Safety
 * `s` must be null or a handle not yet freed.
 */
void ws_signal_free(struct WsSignal *s);

/**
 * Number of energies, or 0 for a null handle.
 *
 * # Safety
 * `s` must be null or a live handle.
 */
size_t ws_spectrum_len(const struct WsSpectrum *s);

/**
 * Energy grid end points.
 *
 * # Safety
 * `s` must be a live handle; outputs may be null.
 */
enum WsStatus ws_spectrum_grid(const struct WsSpectrum *s, double *e_min, double *e_max);

/**
 * Copies the values out; `re`/`im` must each hold `ws_spectrum_len(s)` doubles.
 *
 * # Safety
 * See above.
 */
enum WsStatus ws_spectrum_copy(const struct WsSpectrum *s, double *re, double *im);

/**
 * # Safety
 * `s` must be null or a handle not yet freed.
 */
void ws_spectrum_free(struct WsSpectrum *s);

/**
 * Phase-modulated transform `(1/√2π) ∫ f e^{−i(Et + h)} dt`. Pass `n = 0` for the
 * FFT-conjugate grid of the signal.
 *
 * # Safety
 * `f`, `w` must be live handles and `out` writable.
 */
enum WsStatus ws_modulated_forward(const struct WsSignal *f,
                                   const struct WsWarp *w,
                                   double e_min,
                                   double e_max,
                                   size_t n,
                                   struct WsSpectrum **out);

/**
 * Inverse of [`ws_modulated_forward`] onto `n` points of `[t_min, t_max]`.
 *
 * # Safety
 * `s`, `w` must be live handles and `out` writable.
 */
enum WsStatus ws_modulated_inverse(const struct WsSpectrum *s,
                                   const struct WsWarp *w,
                                   double t_min,
                                   double t_max,
                                   size_t n,
                                   struct WsSignal **out);

/**
 * Warped transform `(1/√2π) ∫ f e^{−iEh} dt`. Pass `n = 0` for the grid conjugate to
 * the `h` spacing.
 *
 * # Safety
 * `f`, `w` must be live handles and `out` writable.
 */
enum WsStatus ws_warped_forward(const struct WsSignal *f,
                                const struct WsWarp *w,
                                double e_min,
                                double e_max,
                                size_t n,
                                enum WsMethod method,
                                struct WsSpectrum **out);

/**
 * Regularized density `S(E)` on `n` energies of `[e_min, e_max]`.
 *
 * # Safety
 * `w` must be a live handle and `out` writable.
 */
enum WsStatus ws_s_density(const struct WsWarp *w,
                           double e_min,
                           double e_max,
                           size_t n,
                           struct WsSpectrum **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WARPSPEC_H */
