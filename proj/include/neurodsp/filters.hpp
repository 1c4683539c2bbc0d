#pragma once

#include <complex>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "neurodsp/fixedpoint.hpp"
#include "neurodsp/signals.hpp"

namespace neurodsp {

/// Direct-form FIR: y(n) = sum_k b_k x(n-k). Coefficients share the data
/// format. The delay line is most-recent-first.
class FirFilter {
public:
  explicit FirFilter(std::vector<QSample> coeffs);

  QSample step(QSample x);
  Trace run(const Trace& x);
  void reset() noexcept;

  QFormat fmt() const noexcept { return fmt_; }
  std::size_t size() const noexcept { return coeffs_.size(); }
  const std::vector<QSample>& coeffs() const noexcept { return coeffs_; }
  const std::vector<std::int64_t>& delay_line() const noexcept { return delay_; }

private:
  std::vector<QSample> coeffs_;
  std::vector<std::int64_t> delay_;
  std::size_t head_ = 0;  // ring index of x(n)
  QFormat fmt_;
};

/// H(z) = g (1 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2).
/// All five coefficients share one coefficient format.
struct BiquadCoeffs {
  QSample g;
  QSample beta1;
  QSample beta2;
  QSample a1;
  QSample a2;

  QFormat fmt() const noexcept { return g.fmt; }
  /// Same format throughout, and |a2| < 1, |a1| < 1 + a2.
  void validate() const;
  bool stable() const noexcept;
  /// Evaluated on the dequantized coefficients.
  std::complex<double> response(double omega) const;
};

/// Direct Form I biquad. Accumulation is exact; one rounding per output.
class Biquad {
public:
  Biquad(BiquadCoeffs coeffs, QFormat data_fmt);

  QSample step(QSample x);
  Trace run(const Trace& x);
  void reset() noexcept;

  const BiquadCoeffs& coeffs() const noexcept { return c_; }
  QFormat data_fmt() const noexcept { return fmt_; }

private:
  BiquadCoeffs c_;
  QFormat fmt_;
  std::int64_t x1_ = 0, x2_ = 0, y1_ = 0, y2_ = 0;
};

/// y[n] = sum b_k x[n-k] - sum_{k>=1} a_k y[n-k], with a_0 = 1 implicit.
/// Both the DF1 and DF2T kernels below round only y, so for equal
/// coefficients they agree sample for sample until something saturates.
struct IirCoeffs {
  std::vector<QSample> b;  // length M+1
  std::vector<QSample> a;  // length N (a_1..a_N)

  QFormat fmt() const;
  void validate() const;
};

class IirDf1 {
public:
  IirDf1(IirCoeffs coeffs, QFormat data_fmt);
  QSample step(QSample x);
  Trace run(const Trace& x);
  void reset() noexcept;

private:
  IirCoeffs c_;
  QFormat fmt_;
  std::vector<std::int64_t> xh_;  // x[n-1], x[n-2], ...
  std::vector<std::int64_t> yh_;  // y[n-1], ...
};

/// Direct Form II transposed, parameterized order. State registers hold
/// full product precision (scale 2^(data.frac + coeff.frac)).
class IirDf2t {
public:
  IirDf2t(IirCoeffs coeffs, QFormat data_fmt);
  QSample step(QSample x);
  Trace run(const Trace& x);
  void reset() noexcept;

  std::size_t state_size() const noexcept { return state_.size(); }

private:
  IirCoeffs c_;
  QFormat fmt_;
  std::vector<wide_int> state_;
};

/// sum_k h[k] e^{-j omega k} on dequantized coefficients. 0 <= omega <= pi.
std::complex<double> fir_freq_response(std::span<const QSample> coeffs, double omega);
std::complex<double> fir_freq_response(std::span<const double> coeffs, double omega);
double fir_dc_gain(std::span<const QSample> coeffs);
/// 20 log10(magnitude); magnitude must be > 0.
double gain_db(double magnitude);

/// Hamming-windowed sinc, normalized to unit DC gain, then quantized.
/// num_taps odd, 0 < cutoff < 0.5 (cycles/sample).
std::vector<QSample> design_lowpass_fir(std::size_t num_taps, double cutoff, QFormat fmt);

/// Bilinear-transform (cookbook) second-order low-pass in g/beta form:
/// beta1 = 2, beta2 = 1, so coeff_fmt needs at least two integer bits.
/// After quantization the DC gain is exactly 1.
BiquadCoeffs design_lowpass_biquad(double cutoff, double q, QFormat coeff_fmt);

/// Expanded (b, a) form of a biquad, requantized to coeff_fmt.
IirCoeffs biquad_to_iir(const BiquadCoeffs& c, QFormat coeff_fmt);

/// Coefficient file: one decimal real per line; '#' starts a comment.
std::vector<double> read_coefficients(std::istream& in);
std::vector<double> load_coefficients(const std::string& path);
std::vector<QSample> quantize_all(std::span<const double> values, QFormat fmt);

/// Coefficient format used for IIR sections over data_fmt: two fewer
/// fractional bits, i.e. range [-4, 4).
QFormat iir_coeff_format(QFormat data_fmt);

}  // namespace neurodsp
