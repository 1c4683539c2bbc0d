#include "neurodsp/neuro_filters.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace neurodsp {

namespace {

QSample quantize_mu(double mu, QFormat fmt) {
  require(mu > 0.0, ErrorCode::InvalidArgument, "learning rate must be > 0");
  const QSample q = quantize(mu, fmt);
  require(q.raw > 0, ErrorCode::InvalidArgument,
          "learning rate underflows " + fmt.to_string());
  return q;
}

WeightMatrix draw_weights(Lcg31& rng, std::size_t rows, std::size_t cols, QFormat fmt) {
  WeightMatrix m(rows, cols, fmt);
  for (auto& r : m.raw) r = quantize(rng.next_centered(), fmt).raw;
  return m;
}

std::vector<QSample> as_vector(const WeightMatrix& m) {
  std::vector<QSample> v;
  v.reserve(m.raw.size());
  for (auto r : m.raw) v.push_back({r, m.fmt});
  return v;
}

WeightMatrix as_column(const std::vector<QSample>& v, QFormat fmt) {
  WeightMatrix m(v.size(), 1, fmt);
  for (std::size_t i = 0; i < v.size(); ++i) m.raw[i] = v[i].raw;
  return m;
}

// (1 - h^2) in h's format, saturating at 1 - LSB.
QSample one_minus_square(QSample h) {
  const int f = h.fmt.frac;
  const wide_int one_sq = static_cast<wide_int>(1) << (2 * f);
  const wide_int h2 = static_cast<wide_int>(h.raw) * h.raw;
  return saturate(round_shift(one_sq - h2, f), h.fmt);
}

QSample register_output(const std::vector<QSample>& w, const std::vector<QSample>& h,
                        QFormat fmt) {
  MacAccumulator acc(2 * fmt.frac);
  for (std::size_t i = 0; i < w.size(); ++i) acc.mac(w[i].raw, h[i].raw);
  return acc.result(fmt);
}

// Runs the output layer through a differential crossbar: hidden activations
// drive the rows as voltages, column currents are subtracted and rescaled.
QSample crossbar_output(const std::vector<QSample>& w, const std::vector<QSample>& h,
                        QFormat fmt, std::optional<DifferentialCrossbar>& programmed,
                        double& scale) {
  if (!programmed) {
    double peak = 1.0;
    for (const auto& v : w) peak = std::max(peak, std::abs(v.value()));
    std::vector<double> normalized;
    normalized.reserve(w.size());
    for (const auto& v : w) normalized.push_back(v.value() / peak);
    programmed = program_weights(w.size(), 1, normalized, CrossbarMatrix::default_g_min(),
                                 CrossbarMatrix::default_g_max());
    scale = peak;
  }
  std::vector<double> volts;
  volts.reserve(h.size());
  for (const auto& v : h) volts.push_back(v.value());
  const double i_pos = crossbar_mac(volts, programmed->positive)[0];
  const double i_neg = crossbar_mac(volts, programmed->negative)[0];
  return quantize(scale * programmed->alpha * (i_pos - i_neg), fmt);
}

void check_fmt(QSample s, QFormat fmt, const char* where) {
  if (!(s.fmt == fmt)) check_same_format(s.fmt, fmt, where);
}

}  // namespace

// ---------------------------------------------------------------- matrices

void WeightMatrix::set(std::size_t r, std::size_t c, QSample v) {
  check_same_format(v.fmt, fmt, "WeightMatrix::set");
  raw[r * cols + c] = v.raw;
}

void write_weight_matrix(std::ostream& out, const WeightMatrix& m) {
  out << "format " << m.fmt.to_string() << " dims " << m.rows << 'x' << m.cols << '\n';
  for (auto r : m.raw) out << r << '\n';
}

WeightMatrix read_weight_matrix(std::istream& in) {
  std::string line;
  do {
    if (!std::getline(in, line)) fail(ErrorCode::Parse, "weight snapshot: missing header");
  } while (line.find_first_not_of(" \t\r") == std::string::npos);

  std::istringstream hdr(line);
  std::string kw_format, fmt_text, kw_dims, dims;
  hdr >> kw_format >> fmt_text >> kw_dims >> dims;
  if (kw_format != "format" || kw_dims != "dims") {
    fail(ErrorCode::Parse, "weight snapshot: bad header '" + line + "'");
  }
  // Accept both ASCII 'x' and the multiplication sign (UTF-8 C3 97).
  std::size_t sep = dims.find('x');
  std::size_t sep_len = 1;
  if (sep == std::string::npos) {
    sep = dims.find("\xC3\x97");
    sep_len = 2;
  }
  if (sep == std::string::npos) fail(ErrorCode::Parse, "weight snapshot: bad dims '" + dims + "'");
  std::size_t rows = 0, cols = 0;
  try {
    rows = std::stoul(dims.substr(0, sep));
    cols = std::stoul(dims.substr(sep + sep_len));
  } catch (const std::exception&) {
    fail(ErrorCode::Parse, "weight snapshot: bad dims '" + dims + "'");
  }
  WeightMatrix m(rows, cols, QFormat::parse(fmt_text));
  for (auto& r : m.raw) {
    if (!std::getline(in, line)) fail(ErrorCode::Parse, "weight snapshot: truncated block");
    try {
      std::size_t used = 0;
      r = std::stoll(line, &used);
      if (line.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument("");
    } catch (const std::exception&) {
      fail(ErrorCode::Parse, "weight snapshot: bad value '" + line + "'");
    }
    if (r > m.fmt.max_raw() || r < m.fmt.min_raw()) {
      fail(ErrorCode::OutOfRange, "weight snapshot: value outside " + m.fmt.to_string());
    }
  }
  return m;
}

WeightMatrix init_weights(std::uint64_t seed, std::size_t rows, std::size_t cols, QFormat fmt) {
  fmt.validate();
  require(rows > 0 && cols > 0, ErrorCode::InvalidArgument, "init_weights: dims must be positive");
  Lcg31 rng(seed);
  return draw_weights(rng, rows, cols, fmt);
}

void enforce_row_sum(WeightMatrix& m, double limit) {
  const double cap = std::ldexp(limit, m.fmt.frac);
  for (std::size_t r = 0; r < m.rows; ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < m.cols; ++c) sum += std::abs(static_cast<double>(m.raw[r * m.cols + c]));
    if (sum <= cap) continue;
    const double k = cap / sum;
    for (std::size_t c = 0; c < m.cols; ++c) {
      auto& v = m.raw[r * m.cols + c];
      v = static_cast<std::int64_t>(std::trunc(static_cast<double>(v) * k));
    }
  }
}

QFormat guard_format(QFormat data_fmt) {
  return QFormat{std::min(64, data_fmt.width + 4), data_fmt.frac};
}

// ---------------------------------------------------------------- tanh LUT

TanhLut::TanhLut(QFormat in_fmt, QFormat out_fmt) : in_(in_fmt), out_(out_fmt) {
  in_.validate();
  out_.validate();
  const wide_int one = static_cast<wide_int>(1) << out_.frac;
  rail_ = saturate_raw(one - 1, out_);
  lut_.assign(kEntries, 0);
  constexpr std::size_t half = kEntries / 2;
  const double last = static_cast<double>(kEntries - 1);
  for (std::size_t i = half; i < kEntries; ++i) {
    const double x = kRange * (2.0 * static_cast<double>(i) - last) / last;
    const auto v = std::min(quantize(std::tanh(x), out_).raw, rail_);
    lut_[i] = v;
    lut_[kEntries - 1 - i] = -v;
  }
}

std::int64_t TanhLut::eval_nonneg(wide_int x_raw) const {
  const int shift = in_.frac + 3;  // table spans 8 = 2^3 input units
  const wide_int range_raw = static_cast<wide_int>(4) << in_.frac;
  if (x_raw > range_raw) return rail_;
  const wide_int pos = (x_raw + range_raw) * static_cast<wide_int>(kEntries - 1);
  const auto i = static_cast<std::size_t>(pos >> shift);
  if (i >= kEntries - 1) return lut_.back();
  const wide_int rem = pos - (static_cast<wide_int>(i) << shift);
  const wide_int delta = static_cast<wide_int>(lut_[i + 1]) - lut_[i];
  return static_cast<std::int64_t>(lut_[i] + round_shift(delta * rem, shift));
}

QSample TanhLut::operator()(QSample x) const {
  check_fmt(x, in_, "tanh_lut");
  // Evaluate |x| and mirror, so odd symmetry is exact.
  if (x.raw >= 0) return {eval_nonneg(x.raw), out_};
  return {-eval_nonneg(-static_cast<wide_int>(x.raw)), out_};
}

// ---------------------------------------------------------------- NeuroFir

NeuroFir::NeuroFir(const NeuroFirConfig& cfg)
    : NeuroFir(init_weights(cfg.seed, cfg.n_hidden, cfg.n_taps, cfg.fmt),
               std::vector<QSample>(cfg.n_hidden, QSample{0, cfg.fmt}), quantize_mu(cfg.mu, cfg.fmt),
               cfg.storage) {}

NeuroFir::NeuroFir(WeightMatrix w_hidden, std::vector<QSample> w_out, QSample mu,
                   WeightStorage storage)
    : w_hidden_(std::move(w_hidden)),
      w_out_(std::move(w_out)),
      mu_(mu),
      fmt_(w_hidden_.fmt),
      storage_(storage),
      lut_(guard_format(w_hidden_.fmt), w_hidden_.fmt) {
  fmt_.validate();
  require(w_hidden_.rows > 0 && w_hidden_.cols > 0, ErrorCode::InvalidArgument,
          "NeuroFir: empty hidden layer");
  require(w_out_.size() == w_hidden_.rows, ErrorCode::DimensionMismatch,
          "NeuroFir: w_out length must equal hidden size");
  for (const auto& w : w_out_) check_same_format(w.fmt, fmt_, "NeuroFir w_out");
  check_same_format(mu_.fmt, fmt_, "NeuroFir mu");
  delay_.assign(w_hidden_.cols, 0);
  hidden_.assign(w_hidden_.rows, QSample{0, fmt_});
}

QSample NeuroFir::output(const std::vector<QSample>& h) const {
  if (storage_ == WeightStorage::Crossbar) {
    return crossbar_output(w_out_, h, fmt_, programmed_, crossbar_scale_);
  }
  return register_output(w_out_, h, fmt_);
}

QSample NeuroFir::forward(QSample x) {
  check_fmt(x, fmt_, "nfir_forward");
  std::rotate(delay_.rbegin(), delay_.rbegin() + 1, delay_.rend());
  delay_[0] = x.raw;
  const QFormat guard = guard_format(fmt_);
  for (std::size_t i = 0; i < w_hidden_.rows; ++i) {
    MacAccumulator acc(2 * fmt_.frac);
    for (std::size_t j = 0; j < w_hidden_.cols; ++j) acc.mac(w_hidden_.raw[i * w_hidden_.cols + j], delay_[j]);
    hidden_[i] = lut_(acc.result(guard));
  }
  return output(hidden_);
}

TrainStep NeuroFir::train_step(QSample x, QSample desired) {
  if (mode_ != Mode::Train) fail(ErrorCode::WrongMode, "nfir_train_step: network is in infer mode");
  check_fmt(desired, fmt_, "nfir_train_step");
  const QSample y = forward(x);
  const QSample err = sat_sub(desired, y);
  if (err.raw != 0) {
    const QSample step = sat_mul(mu_, err);
    for (std::size_t i = 0; i < w_out_.size(); ++i) {
      w_out_[i] = sat_add(w_out_[i], sat_mul(step, hidden_[i]));
    }
    programmed_.reset();
  }
  return {y, err};
}

void NeuroFir::reset_state() noexcept {
  std::fill(delay_.begin(), delay_.end(), 0);
  std::fill(hidden_.begin(), hidden_.end(), QSample{0, fmt_});
}

void NeuroFir::save(std::ostream& out) const {
  write_weight_matrix(out, w_hidden_);
  write_weight_matrix(out, as_column(w_out_, fmt_));
}

// ---------------------------------------------------------------- Elman

namespace {

struct ElmanInit {
  std::vector<QSample> w_in;
  WeightMatrix w_rec;
};

ElmanInit elman_init(const ElmanConfig& cfg) {
  cfg.fmt.validate();
  require(cfg.n_hidden > 0, ErrorCode::InvalidArgument, "ElmanNet: hidden size must be positive");
  Lcg31 rng(cfg.seed);
  ElmanInit out{as_vector(draw_weights(rng, cfg.n_hidden, 1, cfg.fmt)),
                draw_weights(rng, cfg.n_hidden, cfg.n_hidden, cfg.fmt)};
  enforce_row_sum(out.w_rec, cfg.row_sum_limit);
  return out;
}

}  // namespace

ElmanNet::ElmanNet(const ElmanConfig& cfg)
    : ElmanNet([&] {
        auto init = elman_init(cfg);
        return ElmanNet(std::move(init.w_in), std::move(init.w_rec),
                        std::vector<QSample>(cfg.n_hidden, QSample{0, cfg.fmt}),
                        quantize_mu(cfg.mu, cfg.fmt), cfg.storage);
      }()) {}

ElmanNet::ElmanNet(std::vector<QSample> w_in, WeightMatrix w_rec, std::vector<QSample> w_out,
                   QSample mu, WeightStorage storage)
    : w_in_(std::move(w_in)),
      w_rec_(std::move(w_rec)),
      w_out_(std::move(w_out)),
      mu_(mu),
      fmt_(w_rec_.fmt),
      storage_(storage),
      lut_(guard_format(w_rec_.fmt), w_rec_.fmt) {
  fmt_.validate();
  const std::size_t n = w_in_.size();
  require(n > 0, ErrorCode::InvalidArgument, "ElmanNet: empty hidden layer");
  require(w_rec_.rows == n && w_rec_.cols == n && w_out_.size() == n,
          ErrorCode::DimensionMismatch, "ElmanNet: weight shapes disagree with hidden size");
  for (const auto& w : w_in_) check_same_format(w.fmt, fmt_, "ElmanNet w_in");
  for (const auto& w : w_out_) check_same_format(w.fmt, fmt_, "ElmanNet w_out");
  check_same_format(mu_.fmt, fmt_, "ElmanNet mu");
  h_.assign(n, QSample{0, fmt_});
}

QSample ElmanNet::output(const std::vector<QSample>& h) const {
  if (storage_ == WeightStorage::Crossbar) {
    return crossbar_output(w_out_, h, fmt_, programmed_, crossbar_scale_);
  }
  return register_output(w_out_, h, fmt_);
}

QSample ElmanNet::forward(QSample x) {
  check_fmt(x, fmt_, "niir_forward");
  const std::size_t n = w_in_.size();
  const QFormat guard = guard_format(fmt_);
  std::vector<QSample> next(n);
  for (std::size_t i = 0; i < n; ++i) {
    MacAccumulator acc(2 * fmt_.frac);
    acc.mac(w_in_[i].raw, x.raw);
    for (std::size_t j = 0; j < n; ++j) acc.mac(w_rec_.raw[i * n + j], h_[j].raw);
    next[i] = lut_(acc.result(guard));
  }
  h_ = std::move(next);
  return output(h_);
}

TrainStep ElmanNet::train_step(QSample x, QSample desired) {
  if (mode_ != Mode::Train) fail(ErrorCode::WrongMode, "niir_train_step: network is in infer mode");
  check_fmt(desired, fmt_, "niir_train_step");
  const QSample y = forward(x);
  const QSample err = sat_sub(desired, y);
  if (err.raw != 0) {
    const QSample step = sat_mul(mu_, err);
    for (std::size_t i = 0; i < w_out_.size(); ++i) {
      const QSample w_out_old = w_out_[i];
      w_out_[i] = sat_add(w_out_[i], sat_mul(step, h_[i]));
      const QSample grad = sat_mul(sat_mul(sat_mul(step, w_out_old), one_minus_square(h_[i])), x);
      w_in_[i] = sat_add(w_in_[i], grad);
    }
    programmed_.reset();
  }
  return {y, err};
}

void ElmanNet::reset_state() noexcept { std::fill(h_.begin(), h_.end(), QSample{0, fmt_}); }

void ElmanNet::save(std::ostream& out) const {
  write_weight_matrix(out, as_column(w_in_, fmt_));
  write_weight_matrix(out, w_rec_);
  write_weight_matrix(out, as_column(w_out_, fmt_));
}

}  // namespace neurodsp
