#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "neurodsp/fixedpoint.hpp"

namespace neurodsp {

/// 31-bit LCG: state' = (1103515245 * state + 12345) mod 2^31.
/// The n-th output (n from 0) is the state after n+1 updates.
class Lcg31 {
public:
  static constexpr std::uint32_t kMultiplier = 1103515245u;
  static constexpr std::uint32_t kIncrement = 12345u;
  static constexpr std::uint32_t kMask = 0x7fffffffu;

  explicit Lcg31(std::uint64_t seed) noexcept
      : state_(static_cast<std::uint32_t>(seed) & kMask) {}

  std::uint32_t next() noexcept {
    state_ = (kMultiplier * state_ + kIncrement) & kMask;
    return state_;
  }

  /// Uniform in [-0.5, 0.5) from the top 16 of the 31 state bits.
  double next_centered() noexcept {
    return static_cast<double>(next() >> 15) / 65536.0 - 0.5;
  }

  std::uint32_t state() const noexcept { return state_; }

private:
  std::uint32_t state_;
};

struct SignalConfig {
  double amplitude = 0.6;
  double freq = 50.0;         // Hz
  double sample_rate = 1000;  // Hz
  double noise_amp = 0.05;
  std::size_t n_steps = 2000;
  std::uint64_t seed = 1;
  QFormat fmt = kQ15;

  void validate() const;
};

/// Sample sequence sharing one Q-format.
class Trace {
public:
  Trace() = default;
  explicit Trace(QFormat fmt) : fmt_(fmt) {}
  Trace(QFormat fmt, std::vector<std::int64_t> raw)
      : fmt_(fmt), raw_(std::move(raw)) {}

  QFormat fmt() const noexcept { return fmt_; }
  std::size_t size() const noexcept { return raw_.size(); }
  bool empty() const noexcept { return raw_.empty(); }

  QSample operator[](std::size_t i) const { return {raw_[i], fmt_}; }
  double value(std::size_t i) const { return dequantize((*this)[i]); }
  const std::vector<std::int64_t>& raw() const noexcept { return raw_; }

  void push_back(QSample s) {
    check_same_format(s.fmt, fmt_, "Trace::push_back");
    raw_.push_back(s.raw);
  }
  void reserve(std::size_t n) { raw_.reserve(n); }

  std::vector<double> values() const;

  friend bool operator==(const Trace&, const Trace&) = default;

private:
  QFormat fmt_ = kQ15;
  std::vector<std::int64_t> raw_;
};

/// Noise-free phase term plus the bounded mod-1000 noise term, quantized.
Trace gen_test_signal(const SignalConfig& cfg);
Trace gen_impulse(std::size_t n_steps, double amplitude, QFormat fmt);
Trace gen_step(std::size_t n_steps, double amplitude, QFormat fmt);

double mse(const Trace& a, const Trace& b);

/// CSV: `n,raw,value`, value with 9 significant digits.
void write_trace_csv(std::ostream& out, const Trace& t);

/// printf-style "%.9g".
std::string format_sig9(double v);

}  // namespace neurodsp
