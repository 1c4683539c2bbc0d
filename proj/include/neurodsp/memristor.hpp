#pragma once

#include <iosfwd>
#include <span>
#include <vector>

namespace neurodsp {

/// Behavioral device: G(x) = 1 / (r_on x + r_off (1 - x)),
/// dx/dt = k v G(x) 4x(1 - x).
struct MemristorParams {
  double r_on = 100.0;
  double r_off = 16000.0;
  double k = 10000.0;
  double x0 = 0.3;

  void validate() const;
};

struct MemristorState {
  double x = 0.3;
};

double conductance(MemristorState s, const MemristorParams& p) noexcept;
/// Joglekar p = 1 window, vanishes at both rails.
double window(double x) noexcept;
/// One Euler step; x is clamped to [0, 1].
MemristorState memristor_step(MemristorState s, double v, double dt, const MemristorParams& p);

/// Threshold-barrier flux model: dw/dt = i0 sign(v) (e^{|v|/v0} - e^{v_th/v0})
/// when |v| > v_th, else 0. w is unbounded.
struct ThresholdFluxParams {
  double i0 = 1e-3;
  double v0 = 0.25;
  double v_th = 0.5;

  void validate() const;
};

double threshold_flux_step(double w, double v, double dt, const ThresholdFluxParams& p);

struct IvSample {
  double t = 0.0;
  double v = 0.0;
  double i = 0.0;
  double x = 0.0;
};

/// Drives v(t) = v_amp sin(2 pi f t) for n_periods, recording (t, v, i, x)
/// at every step including both endpoints. When the period is a whole
/// number of steps the drive hits v = 0 exactly at each half period.
std::vector<IvSample> iv_sweep(const MemristorParams& p, double v_amp, double v_freq,
                               double dt, std::size_t n_periods);

/// Sum of the absolute enclosed areas of the positive-v and negative-v
/// lobes (V*A). Signed lobes of a pinched loop cancel, so they are taken
/// separately.
double loop_area(std::span<const IvSample> samples);

/// CSV: `t,v,i,x`
void write_iv_csv(std::ostream& out, std::span<const IvSample> samples);

/// Conductance array, rows = inputs, columns = outputs, row-major.
class CrossbarMatrix {
public:
  CrossbarMatrix(std::size_t rows, std::size_t cols, double g_min, double g_max);
  CrossbarMatrix(std::size_t rows, std::size_t cols, std::vector<double> g, double g_min,
                 double g_max);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double g_min() const noexcept { return g_min_; }
  double g_max() const noexcept { return g_max_; }

  double at(std::size_t r, std::size_t c) const { return g_[r * cols_ + c]; }
  void set(std::size_t r, std::size_t c, double g);
  const std::vector<double>& data() const noexcept { return g_; }

  static double default_g_min(const MemristorParams& p = {}) noexcept { return 1.0 / p.r_off; }
  static double default_g_max(const MemristorParams& p = {}) noexcept { return 1.0 / p.r_on; }

private:
  std::size_t rows_;
  std::size_t cols_;
  double g_min_;
  double g_max_;
  std::vector<double> g_;
};

/// Ideal Ohm/Kirchhoff column currents: i_j = sum_i v_i g[i][j].
std::vector<double> crossbar_mac(std::span<const double> v, const CrossbarMatrix& m);

struct DifferentialCrossbar {
  CrossbarMatrix positive;
  CrossbarMatrix negative;
  double alpha;  // w = alpha (g+ - g-)
};

/// Maps signed weights with |w| <= 1 onto a differential pair. levels > 1
/// quantizes each conductance to that many evenly spaced states; levels = 0
/// keeps them continuous.
DifferentialCrossbar program_weights(std::size_t rows, std::size_t cols,
                                     std::span<const double> w, double g_min, double g_max,
                                     std::size_t levels = 256);
std::vector<double> reconstruct_weights(const DifferentialCrossbar& pair);

/// `format real dims RxC` then one %.17g value per line.
void write_real_matrix(std::ostream& out, std::size_t rows, std::size_t cols,
                       std::span<const double> values);
void write_crossbar(std::ostream& out, const CrossbarMatrix& m);

}  // namespace neurodsp
