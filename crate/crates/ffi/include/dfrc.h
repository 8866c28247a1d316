#ifndef DFRC_H
#define DFRC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum DfrcStatus {
  DFRC_STATUS_OK = 0,
  DFRC_STATUS_NULL_POINTER = 1,
  DFRC_STATUS_INVALID_ARGUMENT = 2,
  DFRC_STATUS_DIMENSION = 3,
  DFRC_STATUS_DEGENERATE = 4,
  DFRC_STATUS_SOLVER = 5,
  DFRC_STATUS_BUFFER_TOO_SMALL = 6,
  DFRC_STATUS_PANIC = 7,
  DFRC_STATUS_INTERNAL = 8,
} DfrcStatus;

// Opaque complex matrix.
typedef struct DfrcMatrix DfrcMatrix;

// Opaque result of an alternating-minimization run.
typedef struct DfrcReport DfrcReport;

// Plain-data solver settings. `relative_tolerance` selects
// `epsilon = tolerance * (1 + f0)` instead of an absolute threshold.
typedef struct DfrcAltMinConfig {
  double eta;
  double total_power;
  double tolerance;
  bool relative_tolerance;
  size_t max_iterations;
  uint64_t rng_seed;
} DfrcAltMinConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *dfrc_version(void);

// Length in bytes (without the terminator) of this thread's last error
// message; 0 if there is none.
size_t dfrc_last_error_length(void);

// Copies this thread's last error message, NUL-terminated, into `buf`.
// Needs `dfrc_last_error_length() + 1` bytes.
enum DfrcStatus dfrc_last_error_message(char *buf, size_t buf_len);

// New `rows x cols` matrix from `2 * rows * cols` interleaved doubles in
// row-major order. A null `data` gives the zero matrix.
enum DfrcStatus dfrc_matrix_new(size_t rows,
                                size_t cols,
                                const double *data,
                                struct DfrcMatrix **out);

size_t dfrc_matrix_rows(const struct DfrcMatrix *m);

size_t dfrc_matrix_cols(const struct DfrcMatrix *m);

// Writes `2 * rows * cols` interleaved doubles, row-major.
enum DfrcStatus dfrc_matrix_copy_to(const struct DfrcMatrix *m, double *out, size_t len);

void dfrc_matrix_free(struct DfrcMatrix *m);

// Draws a Saleh-Valenzuela channel matrix (`num_rx x num_tx`).
enum DfrcStatus dfrc_channel_generate(size_t num_tx,
                                      size_t num_rx,
                                      size_t num_paths,
                                      uint64_t seed,
                                      struct DfrcMatrix **out);

// SVD precoder (`N_t x N_S`, power `total_power`) and combiner (`N_r x N_S`).
enum DfrcStatus dfrc_optimal_digital(const struct DfrcMatrix *h,
                                     size_t num_streams,
                                     double total_power,
                                     struct DfrcMatrix **out_precoder,
                                     struct DfrcMatrix **out_combiner);

// Sub-arrayed radar beamformer for targets at `angles_rad`.
enum DfrcStatus dfrc_radar_beamformer(const double *angles_rad,
                                      size_t num_targets,
                                      size_t num_antennas,
                                      double total_power,
                                      struct DfrcMatrix **out);

// `F F^H`.
enum DfrcStatus dfrc_covariance(const struct DfrcMatrix *f, struct DfrcMatrix **out);

// Evaluates `a(theta)^H R a(theta)` at `num_angles` angles (radians) for a
// ULA with `spacing` in wavelengths; `r` must be Hermitian.
enum DfrcStatus dfrc_beampattern(const struct DfrcMatrix *r,
                                 double spacing,
                                 const double *thetas,
                                 size_t num_angles,
                                 double *out_gains);

// Spectral efficiency in bits/s/Hz of precoder `f` and combiner `w` over `h`.
enum DfrcStatus dfrc_achievable_rate(const struct DfrcMatrix *h,
                                     const struct DfrcMatrix *f,
                                     const struct DfrcMatrix *w,
                                     double snr_db,
                                     double *out_rate);

// Default settings: relative tolerance 1e-5, 100 iterations, seed 0.
struct DfrcAltMinConfig dfrc_altmin_config_default(double eta, double total_power);

// Hybrid design fitting `f_com` (`N_t x N_S`) and `f_rad` (`N_t x N_tar`)
// with `num_rf_chains` sub-arrays.
enum DfrcStatus dfrc_taltmin(const struct DfrcMatrix *f_com,
                             const struct DfrcMatrix *f_rad,
                             size_t num_rf_chains,
                             const struct DfrcAltMinConfig *cfg,
                             struct DfrcReport **out);

size_t dfrc_report_iterations(const struct DfrcReport *r);

bool dfrc_report_converged(const struct DfrcReport *r);

// Number of recorded objective values, `iterations + 1`.
size_t dfrc_report_trace_len(const struct DfrcReport *r);

enum DfrcStatus dfrc_report_copy_trace(const struct DfrcReport *r, double *out, size_t len);

size_t dfrc_report_num_antennas(const struct DfrcReport *r);

// Analog phases in `[0, 2 pi)`, one per antenna.
enum DfrcStatus dfrc_report_copy_phases(const struct DfrcReport *r, double *out, size_t len);

// Dense hybrid precoder `F_RF F_BB`.
enum DfrcStatus dfrc_report_precoder(const struct DfrcReport *r, struct DfrcMatrix **out);

enum DfrcStatus dfrc_report_baseband(const struct DfrcReport *r, struct DfrcMatrix **out);

enum DfrcStatus dfrc_report_unitary(const struct DfrcReport *r, struct DfrcMatrix **out);

// The final hybrid beamformer as a JSON document; release the string with
// `dfrc_string_free`.
enum DfrcStatus dfrc_report_to_json(const struct DfrcReport *r, char **out);

void dfrc_report_free(struct DfrcReport *r);

void dfrc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DFRC_H */
