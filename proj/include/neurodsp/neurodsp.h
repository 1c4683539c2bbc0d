#ifndef NEURODSP_H
#define NEURODSP_H

/* C interface to the neurodsp library. All functions return ND_OK or an
 * error status; the message for the last failure on the calling thread is
 * available from nd_last_error(). Handles are opaque and owned by the
 * caller once created. */

#include <stddef.h>
#include <stdint.h>

#if defined(NEURODSP_BUILDING)
#define ND_API __attribute__((visibility("default")))
#else
#define ND_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nd_status {
  ND_OK = 0,
  ND_ERR_INVALID_ARGUMENT = 1,
  ND_ERR_FORMAT_MISMATCH = 2,
  ND_ERR_OUT_OF_RANGE = 3,
  ND_ERR_DIMENSION_MISMATCH = 4,
  ND_ERR_WRONG_MODE = 5,
  ND_ERR_IO = 6,
  ND_ERR_PARSE = 7,
  ND_ERR_INTERNAL = 100
} nd_status;

ND_API const char* nd_status_string(nd_status s);
/* Thread-local; empty string if the last call on this thread succeeded. */
ND_API const char* nd_last_error(void);
ND_API const char* nd_version(void);

/* ---- fixed point ---------------------------------------------------- */

typedef struct nd_qformat {
  int width;
  int frac;
} nd_qformat;

ND_API nd_status nd_qformat_parse(const char* text, nd_qformat* out);
ND_API nd_status nd_quantize(double value, nd_qformat fmt, int64_t* raw);
ND_API nd_status nd_dequantize(int64_t raw, nd_qformat fmt, double* value);
ND_API nd_status nd_sat_add(int64_t a, int64_t b, nd_qformat fmt, int64_t* out);
ND_API nd_status nd_sat_mul(int64_t a, int64_t b, nd_qformat fmt, int64_t* out);

/* ---- classical filters ---------------------------------------------- */

typedef struct nd_fir nd_fir;

ND_API nd_status nd_fir_create(const double* coeffs, size_t n, nd_qformat fmt, nd_fir** out);
/* Coefficient file: one real per line, '#' starts a comment. */
ND_API nd_status nd_fir_load(const char* path, nd_qformat fmt, nd_fir** out);
ND_API nd_status nd_fir_design_lowpass(size_t taps, double cutoff, nd_qformat fmt, nd_fir** out);
ND_API void nd_fir_destroy(nd_fir* f);
ND_API nd_status nd_fir_size(const nd_fir* f, size_t* n);
ND_API nd_status nd_fir_step(nd_fir* f, int64_t x_raw, int64_t* y_raw);
ND_API nd_status nd_fir_reset(nd_fir* f);
ND_API nd_status nd_fir_freq_response(const nd_fir* f, double omega, double* re, double* im);
ND_API nd_status nd_fir_dc_gain(const nd_fir* f, double* gain);
/* CSV `k,omega,re,im,mag,gain_db` at omega = pi k / (points - 1). */
ND_API nd_status nd_fir_write_freq_response(const nd_fir* f, size_t points, const char* path);

typedef struct nd_biquad nd_biquad;

ND_API nd_status nd_biquad_design_lowpass(double cutoff, double q, nd_qformat data_fmt,
                                          nd_biquad** out);
ND_API void nd_biquad_destroy(nd_biquad* b);
ND_API nd_status nd_biquad_step(nd_biquad* b, int64_t x_raw, int64_t* y_raw);
ND_API nd_status nd_biquad_reset(nd_biquad* b);

ND_API nd_status nd_gain_db(double magnitude, double* db);

/* ---- analog design -------------------------------------------------- */

typedef struct nd_sallen_key {
  double alpha, beta, c, r_a;
  double k, f_c, r, r_b;
  double b0, a1, a0;
  int stable;
} nd_sallen_key;

/* r_override <= 0 keeps the computed R for the transfer coefficients. */
ND_API nd_status nd_sallen_key_design(double alpha, double beta, double c_farads, double r_a_ohms,
                                      double r_override, nd_sallen_key* out);

/* ---- spiking neuron ------------------------------------------------- */

typedef struct nd_lif_params {
  double tau, v_rest, r_mem, v_th, v_reset, t_ref, dt;
} nd_lif_params;

ND_API void nd_lif_default_params(nd_lif_params* p);
/* Constant drive; spikes may be NULL. */
ND_API nd_status nd_lif_run_const(const nd_lif_params* p, double current, size_t steps,
                                  uint8_t* spikes, size_t* n_spikes);
ND_API nd_status nd_lif_write_spikes(const nd_lif_params* p, double current, size_t steps,
                                     const char* path);

/* ---- memristor ------------------------------------------------------ */

typedef struct nd_memristor_params {
  double r_on, r_off, k, x0;
} nd_memristor_params;

ND_API void nd_memristor_default_params(nd_memristor_params* p);
ND_API nd_status nd_memristor_conductance(const nd_memristor_params* p, double x, double* g);
/* Sinusoidal sweep written as CSV `t,v,i,x`; loop_area may be NULL. */
ND_API nd_status nd_memristor_write_sweep(const nd_memristor_params* p, double v_amp,
                                          double v_freq, double dt, size_t periods,
                                          const char* path, double* loop_area);
ND_API nd_status nd_crossbar_mac(size_t rows, size_t cols, const double* g, double g_min,
                                 double g_max, const double* v, double* i_out);
ND_API nd_status nd_program_weights(size_t rows, size_t cols, const double* w, double g_min,
                                    double g_max, size_t levels, double* g_pos, double* g_neg,
                                    double* alpha);

/* ---- time-domain arithmetic ----------------------------------------- */

ND_API nd_status nd_time_register(double t_in, double t_clk, double* t_out);
ND_API nd_status nd_time_amplifier(double t_in, double t_clk, double gain, double* t_out);
ND_API nd_status nd_time_adder(const double* t_in, size_t n, double t_clk, double* t_out);
ND_API nd_status nd_z_delay(const double* t_in, size_t n, double t_clk, double gain, double* t_out);

/* ---- experiment ----------------------------------------------------- */

typedef struct nd_config nd_config;
typedef struct nd_result nd_result;

ND_API nd_status nd_config_create(nd_config** out);
ND_API void nd_config_destroy(nd_config* c);
/* Keys match the config file and the CLI flags (e.g. "train-steps"). */
ND_API nd_status nd_config_set(nd_config* c, const char* key, const char* value);
ND_API nd_status nd_config_load_file(nd_config* c, const char* path);

ND_API nd_status nd_experiment_run(const nd_config* c, nd_result** out);
ND_API void nd_result_destroy(nd_result* r);
/* model is one of "fir", "iir", "nfir", "niir". */
ND_API nd_status nd_result_mse(const nd_result* r, const char* model, double* mse);
/* Per-step squared training error of a neural model; copies min(cap, n). */
ND_API nd_status nd_result_train_error(const nd_result* r, const char* model, double* out,
                                       size_t cap, size_t* n);
ND_API nd_status nd_result_write_csv(const nd_result* r, const char* path);
/* Copies the NUL-terminated report if it fits; *needed gets its size. */
ND_API nd_status nd_result_report(const nd_result* r, char* buf, size_t cap, size_t* needed);
ND_API nd_status nd_result_write_weights(const nd_result* r, const char* model, const char* path);

#ifdef __cplusplus
}
#endif

#endif
