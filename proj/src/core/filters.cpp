#include "neurodsp/filters.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <numbers>

namespace neurodsp {

namespace {

void check_omega(double omega) {
  if (!(omega >= 0.0 && omega <= std::numbers::pi)) {
    fail(ErrorCode::OutOfRange, "frequency response: omega must lie in [0, pi]");
  }
}

void check_input(QSample x, QFormat fmt, const char* where) {
  if (!(x.fmt == fmt)) check_same_format(x.fmt, fmt, where);
}

template <class Filter>
Trace run_filter(Filter& f, const Trace& x, QFormat out_fmt) {
  Trace y(out_fmt);
  y.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y.push_back(f.step(x[i]));
  return y;
}

}  // namespace

// ---------------------------------------------------------------- FIR

FirFilter::FirFilter(std::vector<QSample> coeffs) : coeffs_(std::move(coeffs)) {
  require(!coeffs_.empty(), ErrorCode::InvalidArgument, "FIR: need at least one tap");
  fmt_ = coeffs_.front().fmt;
  fmt_.validate();
  for (const auto& c : coeffs_) check_same_format(c.fmt, fmt_, "FIR coefficients");
  delay_.assign(coeffs_.size(), 0);
}

QSample FirFilter::step(QSample x) {
  check_input(x, fmt_, "fir_step");
  const std::size_t m = coeffs_.size();
  head_ = (head_ + m - 1) % m;
  delay_[head_] = x.raw;
  MacAccumulator acc(2 * fmt_.frac);
  for (std::size_t k = 0; k < m; ++k) {
    acc.mac(coeffs_[k].raw, delay_[(head_ + k) % m]);
  }
  return acc.result(fmt_);
}

Trace FirFilter::run(const Trace& x) { return run_filter(*this, x, fmt_); }

void FirFilter::reset() noexcept {
  std::fill(delay_.begin(), delay_.end(), 0);
  head_ = 0;
}

// ---------------------------------------------------------------- biquad

void BiquadCoeffs::validate() const {
  const QFormat f = g.fmt;
  f.validate();
  for (const QSample* c : {&beta1, &beta2, &a1, &a2}) {
    check_same_format(c->fmt, f, "biquad coefficients");
  }
  require(stable(), ErrorCode::InvalidArgument,
          "biquad: poles outside the unit circle (need |a2| < 1 and |a1| < 1 + a2)");
}

bool BiquadCoeffs::stable() const noexcept {
  const double fa1 = a1.value();
  const double fa2 = a2.value();
  return std::abs(fa2) < 1.0 && std::abs(fa1) < 1.0 + fa2;
}

std::complex<double> BiquadCoeffs::response(double omega) const {
  check_omega(omega);
  const std::complex<double> z1 = std::polar(1.0, -omega);
  const std::complex<double> z2 = z1 * z1;
  const auto num = g.value() * (1.0 + beta1.value() * z1 + beta2.value() * z2);
  const auto den = 1.0 + a1.value() * z1 + a2.value() * z2;
  return num / den;
}

Biquad::Biquad(BiquadCoeffs coeffs, QFormat data_fmt) : c_(coeffs), fmt_(data_fmt) {
  fmt_.validate();
  c_.validate();
}

QSample Biquad::step(QSample x) {
  check_input(x, fmt_, "biquad_step");
  const int fc = c_.fmt().frac;
  const wide_int one = static_cast<wide_int>(1) << fc;
  // Feed-forward sum at scale 2^(fd+fc).
  wide_int ff = wide_sat_add(static_cast<wide_int>(x.raw) * one,
                             static_cast<wide_int>(c_.beta1.raw) * x1_);
  ff = wide_sat_add(ff, static_cast<wide_int>(c_.beta2.raw) * x2_);
  // Gain lifts it to 2^(fd+2fc); feedback is scaled up to match.
  wide_int acc = wide_sat_mul(ff, c_.g.raw);
  const wide_int fb = wide_sat_add(static_cast<wide_int>(c_.a1.raw) * y1_,
                                   static_cast<wide_int>(c_.a2.raw) * y2_);
  acc = wide_sat_add(acc, wide_sat_mul(fb, -one));
  const QSample y = saturate(round_shift(acc, 2 * fc), fmt_);
  x2_ = x1_;
  x1_ = x.raw;
  y2_ = y1_;
  y1_ = y.raw;
  return y;
}

Trace Biquad::run(const Trace& x) { return run_filter(*this, x, fmt_); }

void Biquad::reset() noexcept { x1_ = x2_ = y1_ = y2_ = 0; }

// ---------------------------------------------------------------- generic IIR

QFormat IirCoeffs::fmt() const {
  require(!b.empty(), ErrorCode::InvalidArgument, "IIR: need at least b0");
  return b.front().fmt;
}

void IirCoeffs::validate() const {
  const QFormat f = fmt();
  f.validate();
  for (const auto& c : b) check_same_format(c.fmt, f, "IIR b coefficients");
  for (const auto& c : a) check_same_format(c.fmt, f, "IIR a coefficients");
}

IirDf1::IirDf1(IirCoeffs coeffs, QFormat data_fmt)
    : c_(std::move(coeffs)), fmt_(data_fmt) {
  fmt_.validate();
  c_.validate();
  xh_.assign(c_.b.size() - 1, 0);
  yh_.assign(c_.a.size(), 0);
}

QSample IirDf1::step(QSample x) {
  check_input(x, fmt_, "iir_df1_step");
  MacAccumulator acc(fmt_.frac + c_.fmt().frac);
  acc.mac(c_.b[0].raw, x.raw);
  for (std::size_t k = 0; k < xh_.size(); ++k) acc.mac(c_.b[k + 1].raw, xh_[k]);
  for (std::size_t k = 0; k < yh_.size(); ++k) acc.mac(-c_.a[k].raw, yh_[k]);
  const QSample y = acc.result(fmt_);
  if (!xh_.empty()) {
    std::copy_backward(xh_.begin(), xh_.end() - 1, xh_.end());
    xh_[0] = x.raw;
  }
  if (!yh_.empty()) {
    std::copy_backward(yh_.begin(), yh_.end() - 1, yh_.end());
    yh_[0] = y.raw;
  }
  return y;
}

Trace IirDf1::run(const Trace& x) { return run_filter(*this, x, fmt_); }

void IirDf1::reset() noexcept {
  std::fill(xh_.begin(), xh_.end(), 0);
  std::fill(yh_.begin(), yh_.end(), 0);
}

IirDf2t::IirDf2t(IirCoeffs coeffs, QFormat data_fmt)
    : c_(std::move(coeffs)), fmt_(data_fmt) {
  fmt_.validate();
  c_.validate();
  state_.assign(std::max(c_.b.size() - 1, c_.a.size()), 0);
}

QSample IirDf2t::step(QSample x) {
  check_input(x, fmt_, "iir_df2t_step");
  const int fc = c_.fmt().frac;
  const wide_int s1 = state_.empty() ? 0 : state_[0];
  const wide_int full = wide_sat_add(static_cast<wide_int>(c_.b[0].raw) * x.raw, s1);
  const QSample y = saturate(round_shift(full, fc), fmt_);
  const std::size_t n = state_.size();
  for (std::size_t i = 0; i < n; ++i) {
    wide_int s = (i + 1 < n) ? state_[i + 1] : 0;
    if (i + 1 < c_.b.size()) s = wide_sat_add(s, static_cast<wide_int>(c_.b[i + 1].raw) * x.raw);
    if (i < c_.a.size()) s = wide_sat_add(s, -static_cast<wide_int>(c_.a[i].raw) * y.raw);
    state_[i] = s;
  }
  return y;
}

Trace IirDf2t::run(const Trace& x) { return run_filter(*this, x, fmt_); }

void IirDf2t::reset() noexcept { std::fill(state_.begin(), state_.end(), 0); }

// ---------------------------------------------------------------- analysis

std::complex<double> fir_freq_response(std::span<const double> coeffs, double omega) {
  check_omega(omega);
  std::complex<double> h{0.0, 0.0};
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    h += coeffs[k] * std::polar(1.0, -omega * static_cast<double>(k));
  }
  return h;
}

std::complex<double> fir_freq_response(std::span<const QSample> coeffs, double omega) {
  std::vector<double> real;
  real.reserve(coeffs.size());
  for (const auto& c : coeffs) real.push_back(c.value());
  return fir_freq_response(std::span<const double>(real), omega);
}

double fir_dc_gain(std::span<const QSample> coeffs) {
  double s = 0.0;
  for (const auto& c : coeffs) s += c.value();
  return s;
}

double gain_db(double magnitude) {
  if (!(magnitude > 0.0)) {
    fail(ErrorCode::OutOfRange, "gain_db: magnitude must be > 0");
  }
  return 20.0 * std::log10(magnitude);
}

// ---------------------------------------------------------------- design

std::vector<QSample> design_lowpass_fir(std::size_t num_taps, double cutoff, QFormat fmt) {
  fmt.validate();
  require(num_taps >= 1 && num_taps % 2 == 1, ErrorCode::InvalidArgument,
          "design_lowpass_fir: num_taps must be odd");
  require(cutoff > 0.0 && cutoff < 0.5, ErrorCode::InvalidArgument,
          "design_lowpass_fir: cutoff must lie in (0, 0.5)");
  std::vector<double> h(num_taps, 1.0);
  if (num_taps > 1) {
    const double centre = static_cast<double>(num_taps - 1) / 2.0;
    const double span = static_cast<double>(num_taps - 1);
    for (std::size_t n = 0; n < num_taps; ++n) {
      const double t = static_cast<double>(n) - centre;
      const double arg = 2.0 * cutoff * t;
      const double sinc =
          t == 0.0 ? 1.0 : std::sin(std::numbers::pi * arg) / (std::numbers::pi * arg);
      const double window =
          0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / span);
      h[n] = 2.0 * cutoff * sinc * window;
    }
  }
  double sum = 0.0;
  for (double v : h) sum += v;
  for (double& v : h) v /= sum;
  return quantize_all(h, fmt);
}

BiquadCoeffs design_lowpass_biquad(double cutoff, double q, QFormat coeff_fmt) {
  coeff_fmt.validate();
  require(cutoff > 0.0 && cutoff < 0.5, ErrorCode::InvalidArgument,
          "design_lowpass_biquad: cutoff must lie in (0, 0.5)");
  require(q > 0.0, ErrorCode::InvalidArgument, "design_lowpass_biquad: q must be > 0");
  require(coeff_fmt.max_value() >= 2.0, ErrorCode::InvalidArgument,
          "design_lowpass_biquad: coefficient format " + coeff_fmt.to_string() +
              " cannot hold beta1 = 2");

  const double w0 = 2.0 * std::numbers::pi * cutoff;
  const double alpha = std::sin(w0) / (2.0 * q);
  const double a0 = 1.0 + alpha;
  const double a1 = -2.0 * std::cos(w0) / a0;
  const double a2 = (1.0 - alpha) / a0;

  const std::int64_t one = std::int64_t{1} << coeff_fmt.frac;
  const QSample qa1 = quantize(a1, coeff_fmt);
  QSample qa2 = quantize(a2, coeff_fmt);

  // Nudge a2 so the denominator at z = 1 is a multiple of 4 LSB; then
  // g = D/4 makes g * (1 + 2 + 1) / D exactly one.
  const std::int64_t d = one + qa1.raw + qa2.raw;
  const std::int64_t r = ((d % 4) + 4) % 4;
  std::int64_t nudge = -r;
  if (r == 3) {
    nudge = 1;
  } else if (r == 2) {
    const double exact_scaled = std::ldexp(a2, coeff_fmt.frac);
    nudge = (exact_scaled > static_cast<double>(qa2.raw)) ? 2 : -2;
  }
  qa2.raw += nudge;
  const std::int64_t g_raw = (d + nudge) / 4;

  BiquadCoeffs c{{g_raw, coeff_fmt}, {2 * one, coeff_fmt}, {one, coeff_fmt}, qa1, qa2};
  c.validate();
  return c;
}

IirCoeffs biquad_to_iir(const BiquadCoeffs& c, QFormat coeff_fmt) {
  const int fc = c.fmt().frac;
  auto product = [&](QSample a, QSample b) {
    const wide_int p = static_cast<wide_int>(a.raw) * b.raw;  // scale 2^(2fc)
    const int shift = 2 * fc - coeff_fmt.frac;
    return saturate(shift >= 0 ? round_shift(p, shift) : p << -shift, coeff_fmt);
  };
  auto requant = [&](QSample a) {
    const int shift = fc - coeff_fmt.frac;
    const wide_int v = a.raw;
    return saturate(shift >= 0 ? round_shift(v, shift) : v << -shift, coeff_fmt);
  };
  IirCoeffs out;
  out.b = {requant(c.g), product(c.g, c.beta1), product(c.g, c.beta2)};
  out.a = {requant(c.a1), requant(c.a2)};
  return out;
}

QFormat iir_coeff_format(QFormat data_fmt) {
  data_fmt.validate();
  require(data_fmt.width >= 3, ErrorCode::InvalidArgument,
          "IIR coefficient format needs width >= 3");
  return QFormat{data_fmt.width, std::min(data_fmt.frac, data_fmt.width - 3)};
}

// ---------------------------------------------------------------- files

std::vector<double> read_coefficients(std::istream& in) {
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string token = line.substr(first, last - first + 1);
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size() || !std::isfinite(v)) {
      fail(ErrorCode::Parse, "coefficient file line " + std::to_string(lineno) +
                                 ": not a number: '" + token + "'");
    }
    out.push_back(v);
  }
  require(!out.empty(), ErrorCode::Parse, "coefficient file holds no coefficients");
  return out;
}

std::vector<double> load_coefficients(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open coefficient file: " + path);
  return read_coefficients(in);
}

std::vector<QSample> quantize_all(std::span<const double> values, QFormat fmt) {
  std::vector<QSample> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(quantize(v, fmt));
  return out;
}

}  // namespace neurodsp
