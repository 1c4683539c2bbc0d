#include "neurodsp/memristor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <string>

#include "neurodsp/error.hpp"
#include "neurodsp/signals.hpp"

namespace neurodsp {

void MemristorParams::validate() const {
  require(r_on > 0.0 && r_on < r_off, ErrorCode::InvalidArgument,
          "memristor: need 0 < r_on < r_off");
  require(k > 0.0, ErrorCode::InvalidArgument, "memristor: k must be > 0");
  require(x0 >= 0.0 && x0 <= 1.0, ErrorCode::InvalidArgument, "memristor: x0 must lie in [0, 1]");
}

double conductance(MemristorState s, const MemristorParams& p) noexcept {
  return 1.0 / (p.r_on * s.x + p.r_off * (1.0 - s.x));
}

double window(double x) noexcept { return 4.0 * x * (1.0 - x); }

MemristorState memristor_step(MemristorState s, double v, double dt, const MemristorParams& p) {
  require(dt > 0.0, ErrorCode::InvalidArgument, "memristor_step: dt must be > 0");
  const double dx = dt * p.k * v * conductance(s, p) * window(s.x);
  return {std::clamp(s.x + dx, 0.0, 1.0)};
}

void ThresholdFluxParams::validate() const {
  require(i0 > 0.0 && v0 > 0.0 && v_th > 0.0, ErrorCode::InvalidArgument,
          "threshold flux model: i0, v0 and v_th must be > 0");
}

double threshold_flux_step(double w, double v, double dt, const ThresholdFluxParams& p) {
  require(dt > 0.0, ErrorCode::InvalidArgument, "threshold_flux_step: dt must be > 0");
  const double mag = std::abs(v);
  if (mag <= p.v_th) return w;
  const double sign = v > 0.0 ? 1.0 : -1.0;
  return w + dt * p.i0 * sign * (std::exp(mag / p.v0) - std::exp(p.v_th / p.v0));
}

std::vector<IvSample> iv_sweep(const MemristorParams& p, double v_amp, double v_freq, double dt,
                               std::size_t n_periods) {
  p.validate();
  require(v_amp > 0.0 && v_freq > 0.0 && dt > 0.0 && n_periods > 0, ErrorCode::InvalidArgument,
          "iv_sweep: amplitude, frequency, dt and periods must be positive");
  const double steps_per_period = 1.0 / (v_freq * dt);
  const double whole = std::round(steps_per_period);
  const bool integral = whole >= 2.0 && std::abs(steps_per_period - whole) <= 1e-9 * whole;
  const auto period = static_cast<std::size_t>(whole);
  const auto n_steps = integral
                           ? period * n_periods
                           : static_cast<std::size_t>(std::ceil(steps_per_period * n_periods));

  auto drive = [&](std::size_t n) {
    if (integral) {
      const std::size_t m = n % period;
      if ((2 * m) % period == 0) return 0.0;
      return v_amp * std::sin(2.0 * std::numbers::pi * static_cast<double>(m) /
                              static_cast<double>(period));
    }
    return v_amp * std::sin(2.0 * std::numbers::pi * v_freq * static_cast<double>(n) * dt);
  };

  std::vector<IvSample> out;
  out.reserve(n_steps + 1);
  MemristorState s{p.x0};
  for (std::size_t n = 0; n <= n_steps; ++n) {
    const double v = drive(n);
    out.push_back({static_cast<double>(n) * dt, v, conductance(s, p) * v, s.x});
    if (n < n_steps) s = memristor_step(s, v, dt, p);
  }
  return out;
}

double loop_area(std::span<const IvSample> samples) {
  double total = 0.0;
  double lobe = 0.0;
  int lobe_sign = 0;
  const IvSample* first = nullptr;
  const IvSample* last = nullptr;
  auto close = [&]() {
    if (first != nullptr && last != nullptr) {
      lobe += last->v * first->i - first->v * last->i;
      total += std::abs(lobe) / 2.0;
    }
    lobe = 0.0;
    first = last = nullptr;
  };
  for (std::size_t n = 0; n + 1 < samples.size(); ++n) {
    const auto& a = samples[n];
    const auto& b = samples[n + 1];
    const double mid = a.v + b.v;
    const int sign = mid > 0.0 ? 1 : (mid < 0.0 ? -1 : 0);
    if (sign != lobe_sign) {
      close();
      lobe_sign = sign;
    }
    if (first == nullptr) first = &a;
    lobe += a.v * b.i - b.v * a.i;
    last = &b;
  }
  close();
  return total;
}

void write_iv_csv(std::ostream& out, std::span<const IvSample> samples) {
  out << "t,v,i,x\n";
  for (const auto& s : samples) {
    out << format_sig9(s.t) << ',' << format_sig9(s.v) << ',' << format_sig9(s.i) << ','
        << format_sig9(s.x) << '\n';
  }
}

// ---------------------------------------------------------------- crossbar

CrossbarMatrix::CrossbarMatrix(std::size_t rows, std::size_t cols, double g_min, double g_max)
    : CrossbarMatrix(rows, cols, std::vector<double>(rows * cols, g_min), g_min, g_max) {}

CrossbarMatrix::CrossbarMatrix(std::size_t rows, std::size_t cols, std::vector<double> g,
                               double g_min, double g_max)
    : rows_(rows), cols_(cols), g_min_(g_min), g_max_(g_max), g_(std::move(g)) {
  require(rows > 0 && cols > 0, ErrorCode::InvalidArgument, "crossbar: empty matrix");
  require(g_min > 0.0 && g_min < g_max, ErrorCode::InvalidArgument,
          "crossbar: need 0 < g_min < g_max");
  require(g_.size() == rows * cols, ErrorCode::DimensionMismatch,
          "crossbar: conductance count does not match rows x cols");
  for (double v : g_) {
    require(v >= g_min_ && v <= g_max_, ErrorCode::OutOfRange,
            "crossbar: conductance outside [g_min, g_max]");
  }
}

void CrossbarMatrix::set(std::size_t r, std::size_t c, double g) {
  require(r < rows_ && c < cols_, ErrorCode::DimensionMismatch, "crossbar: index out of range");
  require(g >= g_min_ && g <= g_max_, ErrorCode::OutOfRange,
          "crossbar: conductance outside [g_min, g_max]");
  g_[r * cols_ + c] = g;
}

std::vector<double> crossbar_mac(std::span<const double> v, const CrossbarMatrix& m) {
  require(v.size() == m.rows(), ErrorCode::DimensionMismatch,
          "crossbar_mac: input length " + std::to_string(v.size()) + " != rows " +
              std::to_string(m.rows()));
  std::vector<double> i(m.cols(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) i[c] += v[r] * m.at(r, c);
  }
  return i;
}

DifferentialCrossbar program_weights(std::size_t rows, std::size_t cols,
                                     std::span<const double> w, double g_min, double g_max,
                                     std::size_t levels) {
  require(w.size() == rows * cols, ErrorCode::DimensionMismatch,
          "program_weights: weight count does not match rows x cols");
  require(levels != 1, ErrorCode::InvalidArgument, "program_weights: need 0 or >= 2 levels");
  DifferentialCrossbar out{CrossbarMatrix(rows, cols, g_min, g_max),
                           CrossbarMatrix(rows, cols, g_min, g_max), 1.0 / (g_max - g_min)};
  const double span = g_max - g_min;
  const double steps = levels > 1 ? static_cast<double>(levels - 1) : 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double v = w[r * cols + c];
      if (!(std::abs(v) <= 1.0)) {
        fail(ErrorCode::OutOfRange, "program_weights: |w| > 1 at (" + std::to_string(r) + ", " +
                                        std::to_string(c) + ")");
      }
      double mag = std::abs(v);
      if (steps > 0.0) mag = std::round(mag * steps) / steps;
      const double g = std::min(g_max, g_min + mag * span);
      (v >= 0.0 ? out.positive : out.negative).set(r, c, g);
    }
  }
  return out;
}

std::vector<double> reconstruct_weights(const DifferentialCrossbar& pair) {
  const auto& p = pair.positive.data();
  const auto& n = pair.negative.data();
  std::vector<double> w(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) w[k] = pair.alpha * (p[k] - n[k]);
  return w;
}

void write_real_matrix(std::ostream& out, std::size_t rows, std::size_t cols,
                       std::span<const double> values) {
  out << "format real dims " << rows << 'x' << cols << '\n';
  char buf[40];
  for (double v : values) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << '\n';
  }
}

void write_crossbar(std::ostream& out, const CrossbarMatrix& m) {
  write_real_matrix(out, m.rows(), m.cols(), m.data());
}

}  // namespace neurodsp
