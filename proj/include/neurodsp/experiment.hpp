#pragma once

// Train/test comparison of the classical filters and their neural
// counterparts against the classical FIR output ("golden reference").

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "neurodsp/filters.hpp"
#include "neurodsp/neuro_filters.hpp"
#include "neurodsp/signals.hpp"

namespace neurodsp {

enum class ModelKind { Fir, Iir, NeuroFir, NeuroIir };
enum class IirForm { Biquad, Df2t };

/// "fir", "iir", "nfir", "niir"
std::string_view model_key(ModelKind m) noexcept;
std::string_view model_label(ModelKind m) noexcept;
ModelKind parse_model(std::string_view key);
std::vector<ModelKind> parse_model_list(std::string_view csv);

struct ExperimentConfig {
  SignalConfig signal;  // n_steps is ignored; the phase lengths below apply
  std::size_t train_steps = 2000;
  std::size_t test_steps = 2000;
  bool allow_untrained = false;
  std::vector<ModelKind> models{ModelKind::Fir, ModelKind::Iir, ModelKind::NeuroFir,
                                ModelKind::NeuroIir};

  std::size_t fir_taps = 15;
  double fir_cutoff = 0.1;
  std::string fir_coeffs;  // coefficient file; overrides the design when set

  double iir_cutoff = 0.1;
  double iir_q = 0.70710678118654752;
  IirForm iir_form = IirForm::Biquad;

  std::size_t nfir_hidden = 8;
  double nfir_mu = 1.0 / 64.0;
  std::optional<std::uint64_t> nfir_seed;  // default: seed + 101
  std::size_t niir_hidden = 4;
  double niir_mu = 1.0 / 64.0;
  std::optional<std::uint64_t> niir_seed;  // default: seed + 202
  WeightStorage weight_storage = WeightStorage::Registers;

  bool parallel = true;

  void validate() const;

  std::uint64_t train_seed() const noexcept { return signal.seed; }
  std::uint64_t test_seed() const noexcept { return signal.seed + 1; }
  std::uint64_t nfir_weight_seed() const noexcept { return nfir_seed.value_or(signal.seed + 101); }
  std::uint64_t niir_weight_seed() const noexcept { return niir_seed.value_or(signal.seed + 202); }

  bool has(ModelKind m) const noexcept;

  /// Applies one `key = value` setting (config-file key == CLI flag name).
  void set(std::string_view key, std::string_view value);
  /// Reads `[section]` / `key = value` lines ('#' comments) onto *this.
  void load(std::istream& in);
  void load_file(const std::string& path);
  /// Canonical config-file text reproducing this configuration.
  std::string to_config_text() const;
};

/// Section that owns a config key, or empty if the key is unknown.
std::string_view config_section(std::string_view key) noexcept;

struct ModelRun {
  ModelKind kind;
  Trace test_output;
  /// Neural models: per-step squared error against the desired signal
  /// during training, and the test-phase MSE against that desired signal.
  std::vector<double> train_sq_error;
  std::optional<double> test_mse_vs_desired;
  std::string weights;  // snapshot text, neural models only
};

struct ExperimentResult {
  ExperimentConfig config;
  Trace test_input;
  Trace golden;  // classical FIR test-phase output
  std::vector<ModelRun> runs;  // canonical order fir, iir, nfir, niir
  std::map<ModelKind, double> mse_table;

  const ModelRun& run(ModelKind m) const;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Header `n,x,y_<model>...,x_raw,y_<model>_raw...` for the models present.
void write_experiment_csv(std::ostream& out, const ExperimentResult& r);
void emit_csv(const ExperimentResult& r, const std::string& path);
std::string emit_report(const ExperimentResult& r);

}  // namespace neurodsp
