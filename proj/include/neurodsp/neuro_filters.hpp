#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "neurodsp/fixedpoint.hpp"
#include "neurodsp/memristor.hpp"
#include "neurodsp/signals.hpp"

namespace neurodsp {

enum class Mode { Train, Infer };

/// Where adaptive output weights live. Registers: plain fixed-point words.
/// Crossbar: the output MAC runs through a differential memristor pair
/// programmed from the register values (256 conductance levels).
enum class WeightStorage { Registers, Crossbar };

/// Row-major fixed-point matrix.
struct WeightMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  QFormat fmt = kQ15;
  std::vector<std::int64_t> raw;

  WeightMatrix() = default;
  WeightMatrix(std::size_t r, std::size_t c, QFormat f) : rows(r), cols(c), fmt(f), raw(r * c, 0) {}

  QSample at(std::size_t r, std::size_t c) const { return {raw[r * cols + c], fmt}; }
  void set(std::size_t r, std::size_t c, QSample v);

  friend bool operator==(const WeightMatrix&, const WeightMatrix&) = default;
};

/// Snapshot block: header `format qW.F dims RxC`, then one raw integer per line.
void write_weight_matrix(std::ostream& out, const WeightMatrix& m);
WeightMatrix read_weight_matrix(std::istream& in);

/// Uniform in [-0.5, 0.5) from the 31-bit LCG, quantized to fmt.
WeightMatrix init_weights(std::uint64_t seed, std::size_t rows, std::size_t cols, QFormat fmt);

/// Rescales (truncating toward zero) every row whose absolute sum exceeds
/// `limit`, so that sum_j |w[i][j]| <= limit holds on the quantized values.
void enforce_row_sum(WeightMatrix& m, double limit);

/// Pre-activation format for a data format: four extra integer bits.
QFormat guard_format(QFormat data_fmt);

/// tanh sampled at 1024 points spanning [-4, 4] (symmetric grid), linear
/// interpolation in integer arithmetic, +-(1 - LSB) outside the table.
class TanhLut {
public:
  static constexpr std::size_t kEntries = 1024;
  static constexpr double kRange = 4.0;

  TanhLut(QFormat in_fmt, QFormat out_fmt);

  QSample operator()(QSample x) const;

  QFormat in_fmt() const noexcept { return in_; }
  QFormat out_fmt() const noexcept { return out_; }
  const std::vector<std::int64_t>& entries() const noexcept { return lut_; }

private:
  std::int64_t eval_nonneg(wide_int x_raw) const;

  QFormat in_;
  QFormat out_;
  std::vector<std::int64_t> lut_;
  std::int64_t rail_;  // 1 - LSB in out_
};

struct TrainStep {
  QSample y;
  QSample err;
};

struct NeuroFirConfig {
  std::size_t n_taps = 15;
  std::size_t n_hidden = 8;
  double mu = 1.0 / 64.0;
  std::uint64_t seed = 1;
  QFormat fmt = kQ15;
  WeightStorage storage = WeightStorage::Registers;
};

/// Single-hidden-layer approximator of an FIR. The hidden projection is a
/// fixed random matrix; LMS adapts only the output layer.
class NeuroFir {
public:
  explicit NeuroFir(const NeuroFirConfig& cfg);
  /// Explicit weights; w_out.size() == w_hidden.rows.
  NeuroFir(WeightMatrix w_hidden, std::vector<QSample> w_out, QSample mu,
           WeightStorage storage = WeightStorage::Registers);

  QSample forward(QSample x);
  TrainStep train_step(QSample x, QSample desired);

  void set_mode(Mode m) noexcept { mode_ = m; }
  Mode mode() const noexcept { return mode_; }
  /// Clears the delay line and cached activations; weights are kept.
  void reset_state() noexcept;

  QFormat fmt() const noexcept { return fmt_; }
  std::size_t n_taps() const noexcept { return w_hidden_.cols; }
  std::size_t n_hidden() const noexcept { return w_hidden_.rows; }
  const WeightMatrix& w_hidden() const noexcept { return w_hidden_; }
  const std::vector<QSample>& w_out() const noexcept { return w_out_; }
  const std::vector<QSample>& hidden() const noexcept { return hidden_; }
  const std::vector<std::int64_t>& delay_line() const noexcept { return delay_; }
  QSample mu() const noexcept { return mu_; }

  void save(std::ostream& out) const;

private:
  QSample output(const std::vector<QSample>& h) const;

  WeightMatrix w_hidden_;
  std::vector<QSample> w_out_;
  QSample mu_;
  QFormat fmt_;
  WeightStorage storage_;
  TanhLut lut_;
  std::vector<std::int64_t> delay_;  // most recent first
  std::vector<QSample> hidden_;
  Mode mode_ = Mode::Train;
  mutable std::optional<DifferentialCrossbar> programmed_;
  mutable double crossbar_scale_ = 1.0;
};

struct ElmanConfig {
  std::size_t n_hidden = 4;
  double mu = 1.0 / 64.0;
  std::uint64_t seed = 1;
  QFormat fmt = kQ15;
  double row_sum_limit = 0.9;
  WeightStorage storage = WeightStorage::Registers;
};

/// Elman recurrent approximator of an IIR. Training takes a one-step
/// gradient through the output layer: w_out and w_in adapt, w_rec is fixed.
class ElmanNet {
public:
  explicit ElmanNet(const ElmanConfig& cfg);
  ElmanNet(std::vector<QSample> w_in, WeightMatrix w_rec, std::vector<QSample> w_out, QSample mu,
           WeightStorage storage = WeightStorage::Registers);

  QSample forward(QSample x);
  TrainStep train_step(QSample x, QSample desired);

  void set_mode(Mode m) noexcept { mode_ = m; }
  Mode mode() const noexcept { return mode_; }
  /// Zeroes the hidden state.
  void reset_state() noexcept;

  QFormat fmt() const noexcept { return fmt_; }
  std::size_t n_hidden() const noexcept { return w_in_.size(); }
  const std::vector<QSample>& w_in() const noexcept { return w_in_; }
  const WeightMatrix& w_rec() const noexcept { return w_rec_; }
  const std::vector<QSample>& w_out() const noexcept { return w_out_; }
  const std::vector<QSample>& hidden() const noexcept { return h_; }
  QSample mu() const noexcept { return mu_; }

  void save(std::ostream& out) const;

private:
  QSample output(const std::vector<QSample>& h) const;

  std::vector<QSample> w_in_;
  WeightMatrix w_rec_;
  std::vector<QSample> w_out_;
  QSample mu_;
  QFormat fmt_;
  WeightStorage storage_;
  TanhLut lut_;
  std::vector<QSample> h_;
  Mode mode_ = Mode::Train;
  mutable std::optional<DifferentialCrossbar> programmed_;
  mutable double crossbar_scale_ = 1.0;
};

}  // namespace neurodsp
