#pragma once

// Arbitrary-precision reference arithmetic shared by the unit tests and the
// acceptance suite.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <vector>

#include "neurodsp/fixedpoint.hpp"

namespace oracle {

using rational = boost::multiprecision::cpp_rational;
using bigint = boost::multiprecision::cpp_int;
using real50 = boost::multiprecision::cpp_bin_float_50;

inline rational exact(std::int64_t raw, int frac) {
  return rational(bigint(raw), bigint(1) << frac);
}

inline rational exact(neurodsp::QSample s) { return exact(s.raw, s.fmt.frac); }

// Round-half-even of a rational onto the integer grid.
inline bigint round_even(const rational& r) {
  const bigint num = boost::multiprecision::numerator(r);
  const bigint den = boost::multiprecision::denominator(r);
  bigint q = num / den;
  bigint rem = num % den;
  if (rem < 0) {
    q -= 1;
    rem += den;
  }
  const bigint twice = 2 * rem;
  if (twice > den || (twice == den && (q & 1) != 0)) q += 1;
  return q;
}

// Raw value of r rounded to fmt, or nullopt-like flag when it saturates.
struct Rounded {
  std::int64_t raw;
  bool saturated;
};

inline Rounded to_format(const rational& r, neurodsp::QFormat fmt) {
  const bigint q = round_even(r * (bigint(1) << fmt.frac));
  if (q > fmt.max_raw()) return {fmt.max_raw(), true};
  if (q < fmt.min_raw()) return {fmt.min_raw(), true};
  return {static_cast<std::int64_t>(q), false};
}

// y[n] = sum h[k] x[n-k], exact.
inline std::vector<rational> convolve(const std::vector<rational>& h, const std::vector<rational>& x) {
  std::vector<rational> y(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) {
    for (std::size_t k = 0; k < h.size() && k <= n; ++k) y[n] += h[k] * x[n - k];
  }
  return y;
}

}  // namespace oracle
