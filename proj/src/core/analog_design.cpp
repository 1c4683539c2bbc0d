#include "neurodsp/analog_design.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "neurodsp/error.hpp"

namespace neurodsp {

SallenKeyDesign SallenKeyDesign::with_resistance(double r_ohms) const {
  require(r_ohms > 0.0, ErrorCode::InvalidArgument, "Sallen-Key: R must be > 0");
  SallenKeyDesign d = *this;
  d.r = r_ohms;
  return d;
}

SallenKeyDesign sallen_key_design(double alpha, double beta, double c_farads, double r_a_ohms) {
  require(c_farads > 0.0, ErrorCode::InvalidArgument, "Sallen-Key: C must be > 0");
  require(r_a_ohms > 0.0, ErrorCode::InvalidArgument, "Sallen-Key: R_A must be > 0");
  SallenKeyDesign d;
  d.alpha = alpha;
  d.beta = beta;
  d.c = c_farads;
  d.r_a = r_a_ohms;
  d.k = (4.0 + alpha) / 2.0;
  require(d.k > 1.0, ErrorCode::InvalidArgument,
          "Sallen-Key: K = (4 + alpha)/2 must exceed 1 for a positive R_B");
  d.f_c = (4.0 + beta) / 2.0 * 1e3;
  require(d.f_c > 0.0, ErrorCode::InvalidArgument,
          "Sallen-Key: f_c = (4 + beta)/2 kHz must be > 0");
  d.r = 1.0 / (2.0 * std::numbers::pi * d.f_c * c_farads);
  // K = 1 + R_B / R_A
  d.r_b = r_a_ohms * (d.k - 1.0);
  return d;
}

SecondOrderTF sallen_key_transfer(const SallenKeyDesign& d) {
  require(d.r > 0.0 && d.c > 0.0, ErrorCode::InvalidArgument,
          "Sallen-Key: R and C must be > 0");
  const double rc = d.r * d.c;
  return {d.k / (rc * rc), (3.0 - d.k) / rc, 1.0 / (rc * rc)};
}

double tf_magnitude(const SecondOrderTF& tf, double f_hz) {
  require(f_hz >= 0.0, ErrorCode::InvalidArgument, "tf_magnitude: f must be >= 0");
  const std::complex<double> s{0.0, 2.0 * std::numbers::pi * f_hz};
  return std::abs(tf.b0 / (s * s + tf.a1 * s + tf.a0));
}

bool stability_check(const SecondOrderTF& tf) noexcept { return tf.a1 > 0.0 && tf.a0 > 0.0; }

}  // namespace neurodsp
