#include "neurodsp/signals.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

namespace neurodsp {

void SignalConfig::validate() const {
  fmt.validate();
  require(sample_rate > 0, ErrorCode::InvalidArgument,
          "signal: sample rate must be positive");
  require(freq > 0 && freq < sample_rate / 2, ErrorCode::InvalidArgument,
          "signal: need 0 < freq < fs/2");
  require(amplitude >= 0 && noise_amp >= 0, ErrorCode::InvalidArgument,
          "signal: amplitudes must be non-negative");
  require(amplitude + noise_amp <= fmt.max_value(), ErrorCode::OutOfRange,
          "signal: amplitude + noise exceeds the " + fmt.to_string() + " range");
  require(n_steps >= 1, ErrorCode::InvalidArgument, "signal: n_steps must be >= 1");
}

std::vector<double> Trace::values() const {
  std::vector<double> out;
  out.reserve(raw_.size());
  for (auto r : raw_) out.push_back(dequantize({r, fmt_}));
  return out;
}

Trace gen_test_signal(const SignalConfig& cfg) {
  cfg.validate();
  Lcg31 rng(cfg.seed);
  Trace t(cfg.fmt);
  t.reserve(cfg.n_steps);
  const double w = 2.0 * std::numbers::pi * cfg.freq / cfg.sample_rate;
  for (std::size_t n = 0; n < cfg.n_steps; ++n) {
    const auto k = rng.next() % 1000u;
    const double noise = cfg.noise_amp * (2.0 * static_cast<double>(k) / 1000.0 - 1.0);
    const double x = cfg.amplitude * std::sin(w * static_cast<double>(n)) + noise;
    t.push_back(quantize(x, cfg.fmt));
  }
  return t;
}

Trace gen_impulse(std::size_t n_steps, double amplitude, QFormat fmt) {
  require(n_steps >= 1, ErrorCode::InvalidArgument, "impulse: n_steps must be >= 1");
  std::vector<std::int64_t> raw(n_steps, 0);
  raw[0] = quantize(amplitude, fmt).raw;
  return Trace(fmt, std::move(raw));
}

Trace gen_step(std::size_t n_steps, double amplitude, QFormat fmt) {
  require(n_steps >= 1, ErrorCode::InvalidArgument, "step: n_steps must be >= 1");
  return Trace(fmt, std::vector<std::int64_t>(n_steps, quantize(amplitude, fmt).raw));
}

double mse(const Trace& a, const Trace& b) {
  check_same_format(a.fmt(), b.fmt(), "mse");
  require(a.size() == b.size(), ErrorCode::DimensionMismatch,
          "mse: length mismatch (" + std::to_string(a.size()) + " vs " +
              std::to_string(b.size()) + ")");
  require(!a.empty(), ErrorCode::InvalidArgument, "mse: empty traces");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.value(i) - b.value(i);
    sum += d * d;
  }
  return sum / static_cast<double>(a.size());
}

std::string format_sig9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_trace_csv(std::ostream& out, const Trace& t) {
  out << "n,raw,value\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    out << i << ',' << t.raw()[i] << ',' << format_sig9(t.value(i)) << '\n';
  }
}

}  // namespace neurodsp
