#include "neurodsp/fixedpoint.hpp"

#include <charconv>
#include <cmath>
#include <limits>

namespace neurodsp {

namespace {

__extension__ typedef unsigned __int128 wide_uint;

constexpr wide_int kWideMax = static_cast<wide_int>((static_cast<wide_uint>(1) << 127) - 1);
constexpr wide_int kWideMin = -kWideMax - 1;

}  // namespace

void QFormat::validate() const {
  if (!valid()) {
    fail(ErrorCode::InvalidArgument,
         "invalid Q-format: width=" + std::to_string(width) +
             " frac=" + std::to_string(frac) +
             " (need 2 <= width <= 64, 0 <= frac < width)");
  }
}

std::int64_t QFormat::max_raw() const noexcept {
  if (width == 64) return std::numeric_limits<std::int64_t>::max();
  return (std::int64_t{1} << (width - 1)) - 1;
}

std::int64_t QFormat::min_raw() const noexcept {
  if (width == 64) return std::numeric_limits<std::int64_t>::min();
  return -(std::int64_t{1} << (width - 1));
}

double QFormat::lsb() const noexcept { return std::ldexp(1.0, -frac); }

double QFormat::max_value() const noexcept {
  return std::ldexp(static_cast<double>(max_raw()), -frac);
}

double QFormat::min_value() const noexcept {
  return std::ldexp(static_cast<double>(min_raw()), -frac);
}

std::string QFormat::to_string() const {
  return "q" + std::to_string(width) + "." + std::to_string(frac);
}

QFormat QFormat::parse(std::string_view text) {
  auto bad = [&]() -> QFormat {
    fail(ErrorCode::Parse,
         "bad Q-format '" + std::string(text) + "' (expected qW.F, e.g. q16.15)");
  };
  if (text.size() < 4 || (text[0] != 'q' && text[0] != 'Q')) return bad();
  const auto dot = text.find('.');
  if (dot == std::string_view::npos) return bad();
  const auto w_str = text.substr(1, dot - 1);
  const auto f_str = text.substr(dot + 1);
  int w = 0;
  int f = 0;
  auto r1 = std::from_chars(w_str.data(), w_str.data() + w_str.size(), w);
  auto r2 = std::from_chars(f_str.data(), f_str.data() + f_str.size(), f);
  if (w_str.empty() || f_str.empty() || r1.ec != std::errc{} ||
      r1.ptr != w_str.data() + w_str.size() || r2.ec != std::errc{} ||
      r2.ptr != f_str.data() + f_str.size()) {
    return bad();
  }
  QFormat fmt{w, f};
  fmt.validate();
  return fmt;
}

double QSample::value() const noexcept { return dequantize(*this); }

QSample quantize(double value, QFormat fmt) {
  fmt.validate();
  if (std::isnan(value)) fail(ErrorCode::InvalidArgument, "quantize: NaN input");
  const double scaled = std::ldexp(value, fmt.frac);
  const double rail = std::ldexp(1.0, fmt.width - 1);
  if (scaled >= rail) return {fmt.max_raw(), fmt};
  if (scaled <= -rail) return {fmt.min_raw(), fmt};
  // Default FP environment rounds to nearest, ties to even.
  const double r = std::nearbyint(scaled);
  if (r >= rail) return {fmt.max_raw(), fmt};
  return {static_cast<std::int64_t>(r), fmt};
}

double dequantize(QSample s) noexcept {
  return std::ldexp(static_cast<double>(s.raw), -s.fmt.frac);
}

std::int64_t saturate_raw(wide_int v, QFormat fmt) noexcept {
  const wide_int hi = fmt.max_raw();
  const wide_int lo = fmt.min_raw();
  if (v > hi) return fmt.max_raw();
  if (v < lo) return fmt.min_raw();
  return static_cast<std::int64_t>(v);
}

QSample saturate(wide_int v, QFormat fmt) noexcept {
  return {saturate_raw(v, fmt), fmt};
}

wide_int round_shift(wide_int v, int shift) noexcept {
  if (shift <= 0) return v;
  const wide_int floor_q = v >> shift;  // arithmetic shift: floor division
  const wide_int rem = v - (floor_q << shift);
  const wide_int half = static_cast<wide_int>(1) << (shift - 1);
  if (rem > half || (rem == half && (floor_q & 1) != 0)) return floor_q + 1;
  return floor_q;
}

wide_int wide_sat_add(wide_int a, wide_int b) noexcept {
  wide_int out;
  if (__builtin_add_overflow(a, b, &out)) return b > 0 ? kWideMax : kWideMin;
  return out;
}

wide_int wide_sat_mul(wide_int a, wide_int b) noexcept {
  wide_int out;
  if (__builtin_mul_overflow(a, b, &out)) {
    return ((a < 0) != (b < 0)) ? kWideMin : kWideMax;
  }
  return out;
}

QSample MacAccumulator::result(QFormat out) const noexcept {
  const int shift = product_frac_ - out.frac;
  if (shift >= 0) return saturate(round_shift(acc_, shift), out);
  return saturate(wide_sat_mul(acc_, static_cast<wide_int>(1) << -shift), out);
}

QSample sat_add(QSample a, QSample b) {
  check_same_format(a.fmt, b.fmt, "sat_add");
  return saturate(static_cast<wide_int>(a.raw) + b.raw, a.fmt);
}

QSample sat_sub(QSample a, QSample b) {
  check_same_format(a.fmt, b.fmt, "sat_sub");
  return saturate(static_cast<wide_int>(a.raw) - b.raw, a.fmt);
}

QSample sat_mul(QSample a, QSample b) {
  check_same_format(a.fmt, b.fmt, "sat_mul");
  const wide_int p = static_cast<wide_int>(a.raw) * b.raw;
  return saturate(round_shift(p, a.fmt.frac), a.fmt);
}

QSample sat_neg(QSample a) {
  return saturate(-static_cast<wide_int>(a.raw), a.fmt);
}

}  // namespace neurodsp
