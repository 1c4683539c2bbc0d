#pragma once

// Equal-R, equal-C Sallen-Key second-order low-pass design arithmetic.

namespace neurodsp {

struct SallenKeyDesign {
  double alpha = 0.0;
  double beta = 0.0;
  double c = 0.0;    // farads
  double r_a = 0.0;  // ohms
  double k = 0.0;    // DC gain, (4 + alpha) / 2
  double f_c = 0.0;  // hertz, (4 + beta) / 2 kHz
  double r = 0.0;    // ohms, 1 / (2 pi f_c C)
  double r_b = 0.0;  // ohms, R_A (K - 1)

  /// Same design with R replaced, e.g. by a rounded E-series value.
  SallenKeyDesign with_resistance(double r_ohms) const;
};

/// b0 / (s^2 + a1 s + a0)
struct SecondOrderTF {
  double b0 = 0.0;
  double a1 = 0.0;
  double a0 = 0.0;
};

SallenKeyDesign sallen_key_design(double alpha, double beta, double c_farads, double r_a_ohms);
SecondOrderTF sallen_key_transfer(const SallenKeyDesign& d);
double tf_magnitude(const SecondOrderTF& tf, double f_hz);
/// Both poles strictly in the left half-plane.
bool stability_check(const SecondOrderTF& tf) noexcept;

}  // namespace neurodsp
