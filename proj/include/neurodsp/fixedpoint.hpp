#pragma once

// Signed two's-complement Q-format arithmetic. Every operation saturates at
// the format rails and rounds half-to-even; nothing ever wraps.

#include <cstdint>
#include <string>
#include <string_view>

#include "neurodsp/error.hpp"

namespace neurodsp {

// 128-bit intermediate for full-precision products and MAC accumulation.
__extension__ typedef __int128 wide_int;

struct QFormat {
  int width = 24;
  int frac = 16;

  constexpr QFormat() = default;
  constexpr QFormat(int w, int f) : width(w), frac(f) {}

  bool valid() const noexcept {
    return width >= 2 && width <= 64 && frac >= 0 && frac < width;
  }
  void validate() const;

  std::int64_t max_raw() const noexcept;
  std::int64_t min_raw() const noexcept;
  double lsb() const noexcept;
  double max_value() const noexcept;
  double min_value() const noexcept;

  /// "qW.F"
  std::string to_string() const;
  /// Accepts "qW.F" / "QW.F".
  static QFormat parse(std::string_view text);

  friend constexpr bool operator==(QFormat, QFormat) = default;
};

inline constexpr QFormat kQ15{16, 15};
inline constexpr QFormat kDefaultFormat{24, 16};

struct QSample {
  std::int64_t raw = 0;
  QFormat fmt = kQ15;

  double value() const noexcept;
  friend constexpr bool operator==(const QSample&, const QSample&) = default;
};

QSample quantize(double value, QFormat fmt);
double dequantize(QSample s) noexcept;

QSample sat_add(QSample a, QSample b);
QSample sat_sub(QSample a, QSample b);
QSample sat_mul(QSample a, QSample b);
QSample sat_neg(QSample a);

/// Clamps a wide value onto the raw range of fmt.
std::int64_t saturate_raw(wide_int v, QFormat fmt) noexcept;
QSample saturate(wide_int v, QFormat fmt) noexcept;

/// v / 2^shift rounded half-to-even. shift in [0, 126].
wide_int round_shift(wide_int v, int shift) noexcept;

wide_int wide_sat_add(wide_int a, wide_int b) noexcept;
wide_int wide_sat_mul(wide_int a, wide_int b) noexcept;

/// Double-width multiply-accumulate register. Products of a data sample and
/// a coefficient are summed exactly at scale 2^(data.frac + coeff.frac) and
/// rounded once on read-out.
class MacAccumulator {
public:
  explicit MacAccumulator(int product_frac) : product_frac_(product_frac) {}

  void mac(std::int64_t a, std::int64_t b) noexcept {
    acc_ = wide_sat_add(acc_, static_cast<wide_int>(a) * b);
  }
  void add_scaled(wide_int v) noexcept { acc_ = wide_sat_add(acc_, v); }

  wide_int value() const noexcept { return acc_; }
  int product_frac() const noexcept { return product_frac_; }

  /// Round to out.frac and saturate.
  QSample result(QFormat out) const noexcept;

private:
  wide_int acc_ = 0;
  int product_frac_;
};

inline void check_same_format(QFormat a, QFormat b, const char* where) {
  if (!(a == b)) {
    fail(ErrorCode::FormatMismatch,
         std::string(where) + ": format mismatch (" + a.to_string() + " vs " +
             b.to_string() + ")");
  }
}

}  // namespace neurodsp
