#include "neurodsp/neurodsp.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <new>
#include <numbers>
#include <string>
#include <vector>

#include "neurodsp/analog_design.hpp"
#include "neurodsp/experiment.hpp"
#include "neurodsp/filters.hpp"
#include "neurodsp/fixedpoint.hpp"
#include "neurodsp/lif.hpp"
#include "neurodsp/memristor.hpp"
#include "neurodsp/time_domain.hpp"

using namespace neurodsp;

struct nd_fir {
  FirFilter filter;
};

struct nd_biquad {
  Biquad filter;
};

struct nd_config {
  ExperimentConfig cfg;
};

struct nd_result {
  ExperimentResult result;
};

namespace {

thread_local std::string g_last_error;

nd_status set_error(nd_status s, const char* msg) {
  g_last_error = msg;
  return s;
}

template <class Fn>
nd_status guarded(Fn&& fn) noexcept {
  try {
    g_last_error.clear();
    fn();
    return ND_OK;
  } catch (const Error& e) {
    return set_error(static_cast<nd_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(ND_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(ND_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(ND_ERR_INTERNAL, "unknown error");
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) fail(ErrorCode::InvalidArgument, std::string(what) + " must not be NULL");
}

QFormat to_fmt(nd_qformat f) {
  const QFormat q{f.width, f.frac};
  q.validate();
  return q;
}

std::ofstream open_out(const char* path) {
  need(path, "path");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, std::string("cannot write ") + path);
  return out;
}

void close_out(std::ofstream& out, const char* path) {
  out.flush();
  if (!out) fail(ErrorCode::Io, std::string("write failed: ") + path);
}

LifParams to_lif(const nd_lif_params* p) {
  need(p, "params");
  LifParams l;
  l.tau = p->tau;
  l.v_rest = p->v_rest;
  l.r_mem = p->r_mem;
  l.v_th = p->v_th;
  l.v_reset = p->v_reset;
  l.t_ref = p->t_ref;
  l.dt = p->dt;
  l.validate();
  return l;
}

MemristorParams to_mem(const nd_memristor_params* p) {
  need(p, "params");
  MemristorParams m{p->r_on, p->r_off, p->k, p->x0};
  m.validate();
  return m;
}

}  // namespace

extern "C" {

const char* nd_status_string(nd_status s) {
  switch (s) {
    case ND_OK: return "ok";
    case ND_ERR_INVALID_ARGUMENT: return "invalid argument";
    case ND_ERR_FORMAT_MISMATCH: return "format mismatch";
    case ND_ERR_OUT_OF_RANGE: return "out of range";
    case ND_ERR_DIMENSION_MISMATCH: return "dimension mismatch";
    case ND_ERR_WRONG_MODE: return "wrong mode";
    case ND_ERR_IO: return "i/o error";
    case ND_ERR_PARSE: return "parse error";
    case ND_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* nd_last_error(void) { return g_last_error.c_str(); }

const char* nd_version(void) { return "0.1.0"; }

// ---- fixed point

nd_status nd_qformat_parse(const char* text, nd_qformat* out) {
  return guarded([&] {
    need(text, "text");
    need(out, "out");
    const QFormat q = QFormat::parse(text);
    *out = {q.width, q.frac};
  });
}

nd_status nd_quantize(double value, nd_qformat fmt, int64_t* raw) {
  return guarded([&] {
    need(raw, "raw");
    *raw = quantize(value, to_fmt(fmt)).raw;
  });
}

nd_status nd_dequantize(int64_t raw, nd_qformat fmt, double* value) {
  return guarded([&] {
    need(value, "value");
    const QFormat q = to_fmt(fmt);
    require(raw >= q.min_raw() && raw <= q.max_raw(), ErrorCode::OutOfRange,
            "raw value outside " + q.to_string());
    *value = dequantize({raw, q});
  });
}

nd_status nd_sat_add(int64_t a, int64_t b, nd_qformat fmt, int64_t* out) {
  return guarded([&] {
    need(out, "out");
    const QFormat q = to_fmt(fmt);
    *out = sat_add({a, q}, {b, q}).raw;
  });
}

nd_status nd_sat_mul(int64_t a, int64_t b, nd_qformat fmt, int64_t* out) {
  return guarded([&] {
    need(out, "out");
    const QFormat q = to_fmt(fmt);
    *out = sat_mul({a, q}, {b, q}).raw;
  });
}

// ---- FIR

nd_status nd_fir_create(const double* coeffs, size_t n, nd_qformat fmt, nd_fir** out) {
  return guarded([&] {
    need(coeffs, "coeffs");
    need(out, "out");
    *out = new nd_fir{FirFilter(quantize_all({coeffs, n}, to_fmt(fmt)))};
  });
}

nd_status nd_fir_load(const char* path, nd_qformat fmt, nd_fir** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    const auto c = load_coefficients(path);
    *out = new nd_fir{FirFilter(quantize_all(c, to_fmt(fmt)))};
  });
}

nd_status nd_fir_design_lowpass(size_t taps, double cutoff, nd_qformat fmt, nd_fir** out) {
  return guarded([&] {
    need(out, "out");
    *out = new nd_fir{FirFilter(design_lowpass_fir(taps, cutoff, to_fmt(fmt)))};
  });
}

void nd_fir_destroy(nd_fir* f) { delete f; }

nd_status nd_fir_size(const nd_fir* f, size_t* n) {
  return guarded([&] {
    need(f, "fir");
    need(n, "n");
    *n = f->filter.size();
  });
}

nd_status nd_fir_step(nd_fir* f, int64_t x_raw, int64_t* y_raw) {
  return guarded([&] {
    need(f, "fir");
    need(y_raw, "y_raw");
    *y_raw = f->filter.step({x_raw, f->filter.fmt()}).raw;
  });
}

nd_status nd_fir_reset(nd_fir* f) {
  return guarded([&] {
    need(f, "fir");
    f->filter.reset();
  });
}

nd_status nd_fir_freq_response(const nd_fir* f, double omega, double* re, double* im) {
  return guarded([&] {
    need(f, "fir");
    need(re, "re");
    need(im, "im");
    const auto h = fir_freq_response(std::span<const QSample>(f->filter.coeffs()), omega);
    *re = h.real();
    *im = h.imag();
  });
}

nd_status nd_fir_dc_gain(const nd_fir* f, double* gain) {
  return guarded([&] {
    need(f, "fir");
    need(gain, "gain");
    *gain = fir_dc_gain(f->filter.coeffs());
  });
}

nd_status nd_fir_write_freq_response(const nd_fir* f, size_t points, const char* path) {
  return guarded([&] {
    need(f, "fir");
    require(points >= 2, ErrorCode::InvalidArgument, "points must be >= 2");
    auto out = open_out(path);
    out << "k,omega,re,im,mag,gain_db\n";
    const std::span<const QSample> c(f->filter.coeffs());
    for (std::size_t k = 0; k < points; ++k) {
      const double omega = std::numbers::pi * static_cast<double>(k) / static_cast<double>(points - 1);
      const auto h = fir_freq_response(c, omega);
      const double mag = std::abs(h);
      out << k << ',' << format_sig9(omega) << ',' << format_sig9(h.real()) << ','
          << format_sig9(h.imag()) << ',' << format_sig9(mag) << ','
          << (mag > 0.0 ? format_sig9(gain_db(mag)) : std::string("-inf")) << '\n';
    }
    close_out(out, path);
  });
}

// ---- biquad

nd_status nd_biquad_design_lowpass(double cutoff, double q, nd_qformat data_fmt, nd_biquad** out) {
  return guarded([&] {
    need(out, "out");
    const QFormat fmt = to_fmt(data_fmt);
    const QFormat cf = iir_coeff_format(fmt);
    *out = new nd_biquad{Biquad(design_lowpass_biquad(cutoff, q, cf), fmt)};
  });
}

void nd_biquad_destroy(nd_biquad* b) { delete b; }

nd_status nd_biquad_step(nd_biquad* b, int64_t x_raw, int64_t* y_raw) {
  return guarded([&] {
    need(b, "biquad");
    need(y_raw, "y_raw");
    *y_raw = b->filter.step({x_raw, b->filter.data_fmt()}).raw;
  });
}

nd_status nd_biquad_reset(nd_biquad* b) {
  return guarded([&] {
    need(b, "biquad");
    b->filter.reset();
  });
}

nd_status nd_gain_db(double magnitude, double* db) {
  return guarded([&] {
    need(db, "db");
    *db = gain_db(magnitude);
  });
}

// ---- analog

nd_status nd_sallen_key_design(double alpha, double beta, double c_farads, double r_a_ohms,
                               double r_override, nd_sallen_key* out) {
  return guarded([&] {
    need(out, "out");
    const auto d = sallen_key_design(alpha, beta, c_farads, r_a_ohms);
    const auto tf = sallen_key_transfer(r_override > 0.0 ? d.with_resistance(r_override) : d);
    *out = {d.alpha, d.beta, d.c, d.r_a, d.k, d.f_c, d.r, d.r_b,
            tf.b0, tf.a1, tf.a0, stability_check(tf) ? 1 : 0};
  });
}

// ---- LIF

void nd_lif_default_params(nd_lif_params* p) {
  if (p == nullptr) return;
  const LifParams l;
  *p = {l.tau, l.v_rest, l.r_mem, l.v_th, l.v_reset, l.t_ref, l.dt};
}

nd_status nd_lif_run_const(const nd_lif_params* p, double current, size_t steps, uint8_t* spikes,
                           size_t* n_spikes) {
  return guarded([&] {
    const LifParams l = to_lif(p);
    const auto s = lif_run(l, std::vector<double>(steps, current));
    std::size_t count = 0;
    for (std::size_t n = 0; n < s.size(); ++n) {
      if (spikes != nullptr) spikes[n] = s[n] ? 1 : 0;
      count += s[n] ? 1 : 0;
    }
    if (n_spikes != nullptr) *n_spikes = count;
  });
}

nd_status nd_lif_write_spikes(const nd_lif_params* p, double current, size_t steps,
                              const char* path) {
  return guarded([&] {
    const LifParams l = to_lif(p);
    const auto s = lif_run(l, std::vector<double>(steps, current));
    auto out = open_out(path);
    write_spikes_csv(out, s);
    close_out(out, path);
  });
}

// ---- memristor

void nd_memristor_default_params(nd_memristor_params* p) {
  if (p == nullptr) return;
  const MemristorParams m;
  *p = {m.r_on, m.r_off, m.k, m.x0};
}

nd_status nd_memristor_conductance(const nd_memristor_params* p, double x, double* g) {
  return guarded([&] {
    need(g, "g");
    const MemristorParams m = to_mem(p);
    require(x >= 0.0 && x <= 1.0, ErrorCode::OutOfRange, "state x must lie in [0, 1]");
    *g = conductance({x}, m);
  });
}

nd_status nd_memristor_write_sweep(const nd_memristor_params* p, double v_amp, double v_freq,
                                   double dt, size_t periods, const char* path,
                                   double* area) {
  return guarded([&] {
    const MemristorParams m = to_mem(p);
    const auto samples = iv_sweep(m, v_amp, v_freq, dt, periods);
    auto out = open_out(path);
    write_iv_csv(out, samples);
    close_out(out, path);
    if (area != nullptr) *area = loop_area(samples);
  });
}

nd_status nd_crossbar_mac(size_t rows, size_t cols, const double* g, double g_min, double g_max,
                          const double* v, double* i_out) {
  return guarded([&] {
    need(g, "g");
    need(v, "v");
    need(i_out, "i_out");
    const CrossbarMatrix m(rows, cols, std::vector<double>(g, g + rows * cols), g_min, g_max);
    const auto i = crossbar_mac({v, rows}, m);
    std::copy(i.begin(), i.end(), i_out);
  });
}

nd_status nd_program_weights(size_t rows, size_t cols, const double* w, double g_min, double g_max,
                             size_t levels, double* g_pos, double* g_neg, double* alpha) {
  return guarded([&] {
    need(w, "w");
    need(g_pos, "g_pos");
    need(g_neg, "g_neg");
    need(alpha, "alpha");
    const auto pair = program_weights(rows, cols, {w, rows * cols}, g_min, g_max, levels);
    std::copy(pair.positive.data().begin(), pair.positive.data().end(), g_pos);
    std::copy(pair.negative.data().begin(), pair.negative.data().end(), g_neg);
    *alpha = pair.alpha;
  });
}

// ---- time domain

nd_status nd_time_register(double t_in, double t_clk, double* t_out) {
  return guarded([&] {
    need(t_out, "t_out");
    *t_out = time_register({t_in}, {t_clk}).width;
  });
}

nd_status nd_time_amplifier(double t_in, double t_clk, double gain, double* t_out) {
  return guarded([&] {
    need(t_out, "t_out");
    *t_out = time_amplifier({t_in}, {t_clk}, gain).width;
  });
}

nd_status nd_time_adder(const double* t_in, size_t n, double t_clk, double* t_out) {
  return guarded([&] {
    need(t_in, "t_in");
    need(t_out, "t_out");
    std::vector<TimePulse> p;
    p.reserve(n);
    for (std::size_t k = 0; k < n; ++k) p.push_back({t_in[k]});
    *t_out = time_adder(p, {t_clk}).width;
  });
}

nd_status nd_z_delay(const double* t_in, size_t n, double t_clk, double gain, double* t_out) {
  return guarded([&] {
    need(t_in, "t_in");
    need(t_out, "t_out");
    std::vector<TimePulse> p;
    p.reserve(n);
    for (std::size_t k = 0; k < n; ++k) p.push_back({t_in[k]});
    const auto y = z_delay(p, {t_clk}, gain);
    for (std::size_t k = 0; k < n; ++k) t_out[k] = y[k].width;
  });
}

// ---- experiment

nd_status nd_config_create(nd_config** out) {
  return guarded([&] {
    need(out, "out");
    *out = new nd_config{};
  });
}

void nd_config_destroy(nd_config* c) { delete c; }

nd_status nd_config_set(nd_config* c, const char* key, const char* value) {
  return guarded([&] {
    need(c, "config");
    need(key, "key");
    need(value, "value");
    c->cfg.set(key, value);
  });
}

nd_status nd_config_load_file(nd_config* c, const char* path) {
  return guarded([&] {
    need(c, "config");
    need(path, "path");
    c->cfg.load_file(path);
  });
}

nd_status nd_experiment_run(const nd_config* c, nd_result** out) {
  return guarded([&] {
    need(c, "config");
    need(out, "out");
    *out = new nd_result{run_experiment(c->cfg)};
  });
}

void nd_result_destroy(nd_result* r) { delete r; }

nd_status nd_result_mse(const nd_result* r, const char* model, double* value) {
  return guarded([&] {
    need(r, "result");
    need(model, "model");
    need(value, "mse");
    const ModelKind m = parse_model(model);
    const auto it = r->result.mse_table.find(m);
    if (it == r->result.mse_table.end()) {
      fail(ErrorCode::InvalidArgument, std::string("model '") + model + "' was not run");
    }
    *value = it->second;
  });
}

nd_status nd_result_train_error(const nd_result* r, const char* model, double* out, size_t cap,
                                size_t* n) {
  return guarded([&] {
    need(r, "result");
    need(model, "model");
    need(n, "n");
    const auto& e = r->result.run(parse_model(model)).train_sq_error;
    *n = e.size();
    if (out != nullptr) std::copy_n(e.begin(), std::min(cap, e.size()), out);
  });
}

nd_status nd_result_write_csv(const nd_result* r, const char* path) {
  return guarded([&] {
    need(r, "result");
    need(path, "path");
    emit_csv(r->result, path);
  });
}

nd_status nd_result_report(const nd_result* r, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    need(r, "result");
    const std::string text = emit_report(r->result);
    if (needed != nullptr) *needed = text.size() + 1;
    if (buf == nullptr || cap == 0) return;
    require(cap > text.size(), ErrorCode::OutOfRange, "report buffer too small");
    std::memcpy(buf, text.c_str(), text.size() + 1);
  });
}

nd_status nd_result_write_weights(const nd_result* r, const char* model, const char* path) {
  return guarded([&] {
    need(r, "result");
    need(model, "model");
    const auto& run = r->result.run(parse_model(model));
    require(!run.weights.empty(), ErrorCode::InvalidArgument,
            std::string("model '") + model + "' has no weights");
    auto out = open_out(path);
    out << run.weights;
    close_out(out, path);
  });
}

}  // extern "C"
