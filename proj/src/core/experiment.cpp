#include "neurodsp/experiment.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <istream>
#include <sstream>

namespace neurodsp {

namespace {

constexpr std::array<ModelKind, 4> kCanonicalOrder{ModelKind::Fir, ModelKind::Iir,
                                                   ModelKind::NeuroFir, ModelKind::NeuroIir};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* expected) {
  fail(ErrorCode::Parse, "config key '" + std::string(key) + "': expected " + expected +
                             ", got '" + std::string(value) + "'");
}

double parse_real(std::string_view key, std::string_view value) {
  const std::string v = trim(value);
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(d)) bad_value(key, value, "a real number");
  return d;
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view value) {
  const std::string v = trim(value);
  std::uint64_t out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || r.ec != std::errc{} || r.ptr != v.data() + v.size()) {
    bad_value(key, value, "a non-negative integer");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  const std::string v = trim(value);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, value, "true/false");
}

std::string real_text(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

struct KeyInfo {
  std::string_view key;
  std::string_view section;
};

constexpr std::array<KeyInfo, 21> kKeys{{
    {"amp", "signal"},          {"freq", "signal"},       {"fs", "signal"},
    {"noise", "signal"},        {"seed", "signal"},       {"format", "signal"},
    {"models", "run"},          {"steps", "run"},         {"train-steps", "run"},
    {"allow-untrained", "run"}, {"weight-storage", "run"},
    {"fir-taps", "fir"},        {"fir-cutoff", "fir"},    {"fir-coeffs", "fir"},
    {"iir-cutoff", "iir"},      {"iir-q", "iir"},         {"iir-form", "iir"},
    {"nfir-hidden", "nfir"},    {"nfir-mu", "nfir"},      {"nfir-seed", "nfir"},
    {"niir-hidden", "niir"},
}};
// niir-mu / niir-seed are looked up through config_section's fallback below.

template <class Net>
ModelRun train_and_test(ModelKind kind, Net& net, const Trace& train, const Trace& desired_train,
                        const Trace& test, const Trace& desired_test) {
  ModelRun run{kind, Trace(test.fmt()), {}, std::nullopt, {}};
  net.set_mode(Mode::Train);
  net.reset_state();
  run.train_sq_error.reserve(train.size());
  for (std::size_t n = 0; n < train.size(); ++n) {
    const auto step = net.train_step(train[n], desired_train[n]);
    const double e = step.err.value();
    run.train_sq_error.push_back(e * e);
  }
  net.set_mode(Mode::Infer);
  net.reset_state();
  run.test_output.reserve(test.size());
  for (std::size_t n = 0; n < test.size(); ++n) run.test_output.push_back(net.forward(test[n]));
  run.test_mse_vs_desired = mse(run.test_output, desired_test);
  std::ostringstream snap;
  net.save(snap);
  run.weights = snap.str();
  return run;
}

std::string with_model(ModelKind m, const std::string& what) {
  return std::string(model_key(m)) + ": " + what;
}

// Runs fn and prefixes any module error with the model name.
template <class Fn>
ModelRun attributed(ModelKind m, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), with_model(m, e.what()));
  }
}

}  // namespace

std::string_view config_section(std::string_view key) noexcept {
  for (const auto& k : kKeys) {
    if (k.key == key) return k.section;
  }
  if (key == "niir-mu" || key == "niir-seed") return "niir";
  return {};
}

std::string_view model_key(ModelKind m) noexcept {
  switch (m) {
    case ModelKind::Fir: return "fir";
    case ModelKind::Iir: return "iir";
    case ModelKind::NeuroFir: return "nfir";
    case ModelKind::NeuroIir: return "niir";
  }
  return "?";
}

std::string_view model_label(ModelKind m) noexcept {
  switch (m) {
    case ModelKind::Fir: return "Classical FIR";
    case ModelKind::Iir: return "Classical IIR";
    case ModelKind::NeuroFir: return "Neuromorphic FIR";
    case ModelKind::NeuroIir: return "Neuromorphic IIR";
  }
  return "?";
}

ModelKind parse_model(std::string_view key) {
  for (auto m : kCanonicalOrder) {
    if (model_key(m) == key) return m;
  }
  fail(ErrorCode::Parse, "unknown model '" + std::string(key) + "' (expected fir, iir, nfir, niir)");
}

std::vector<ModelKind> parse_model_list(std::string_view csv) {
  std::vector<ModelKind> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const auto comma = csv.find(',', start);
    const auto token = trim(csv.substr(start, comma == std::string_view::npos ? csv.npos : comma - start));
    if (!token.empty()) {
      const auto m = parse_model(token);
      if (std::find(out.begin(), out.end(), m) != out.end()) {
        fail(ErrorCode::Parse, "model '" + token + "' listed twice");
      }
      out.push_back(m);
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  require(!out.empty(), ErrorCode::InvalidArgument, "model list is empty");
  return out;
}

// ---------------------------------------------------------------- config

bool ExperimentConfig::has(ModelKind m) const noexcept {
  return std::find(models.begin(), models.end(), m) != models.end();
}

void ExperimentConfig::validate() const {
  SignalConfig s = signal;
  s.n_steps = std::max<std::size_t>(test_steps, 1);
  s.validate();
  require(!models.empty(), ErrorCode::InvalidArgument, "experiment: model set is empty");
  require(test_steps >= 1, ErrorCode::InvalidArgument, "experiment: steps must be >= 1");
  require(train_steps >= 1 || allow_untrained, ErrorCode::InvalidArgument,
          "experiment: train-steps = 0 requires allow-untrained");
  if (fir_coeffs.empty()) {
    require(fir_taps >= 1 && fir_taps % 2 == 1, ErrorCode::InvalidArgument,
            "experiment: fir-taps must be odd");
    require(fir_cutoff > 0 && fir_cutoff < 0.5, ErrorCode::InvalidArgument,
            "experiment: fir-cutoff must lie in (0, 0.5)");
  }
  require(iir_cutoff > 0 && iir_cutoff < 0.5, ErrorCode::InvalidArgument,
          "experiment: iir-cutoff must lie in (0, 0.5)");
  require(iir_q > 0, ErrorCode::InvalidArgument, "experiment: iir-q must be > 0");
  require(nfir_hidden > 0 && niir_hidden > 0, ErrorCode::InvalidArgument,
          "experiment: hidden sizes must be positive");
  require(nfir_mu > 0 && niir_mu > 0, ErrorCode::InvalidArgument,
          "experiment: learning rates must be > 0");
}

void ExperimentConfig::set(std::string_view key, std::string_view value) {
  if (key == "amp") signal.amplitude = parse_real(key, value);
  else if (key == "freq") signal.freq = parse_real(key, value);
  else if (key == "fs") signal.sample_rate = parse_real(key, value);
  else if (key == "noise") signal.noise_amp = parse_real(key, value);
  else if (key == "seed") signal.seed = parse_unsigned(key, value);
  else if (key == "format") signal.fmt = QFormat::parse(trim(value));
  else if (key == "models") models = parse_model_list(value);
  else if (key == "steps") test_steps = parse_unsigned(key, value);
  else if (key == "train-steps") train_steps = parse_unsigned(key, value);
  else if (key == "allow-untrained") allow_untrained = parse_bool(key, value);
  else if (key == "weight-storage") {
    const auto v = trim(value);
    if (v == "registers") weight_storage = WeightStorage::Registers;
    else if (v == "crossbar") weight_storage = WeightStorage::Crossbar;
    else bad_value(key, value, "registers or crossbar");
  }
  else if (key == "fir-taps") fir_taps = parse_unsigned(key, value);
  else if (key == "fir-cutoff") fir_cutoff = parse_real(key, value);
  else if (key == "fir-coeffs") fir_coeffs = trim(value);
  else if (key == "iir-cutoff") iir_cutoff = parse_real(key, value);
  else if (key == "iir-q") iir_q = parse_real(key, value);
  else if (key == "iir-form") {
    const auto v = trim(value);
    if (v == "biquad") iir_form = IirForm::Biquad;
    else if (v == "df2t") iir_form = IirForm::Df2t;
    else bad_value(key, value, "biquad or df2t");
  }
  else if (key == "nfir-hidden") nfir_hidden = parse_unsigned(key, value);
  else if (key == "nfir-mu") nfir_mu = parse_real(key, value);
  else if (key == "nfir-seed") nfir_seed = parse_unsigned(key, value);
  else if (key == "niir-hidden") niir_hidden = parse_unsigned(key, value);
  else if (key == "niir-mu") niir_mu = parse_real(key, value);
  else if (key == "niir-seed") niir_seed = parse_unsigned(key, value);
  else fail(ErrorCode::Parse, "unknown config key '" + std::string(key) + "'");
}

void ExperimentConfig::load(std::istream& in) {
  std::string line;
  std::string section;
  std::size_t lineno = 0;
  auto where = [&] { return "config line " + std::to_string(lineno) + ": "; };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') fail(ErrorCode::Parse, where() + "unterminated section header");
      section = trim(std::string_view(text).substr(1, text.size() - 2));
      if (section != "signal" && section != "run" && section != "fir" && section != "iir" &&
          section != "nfir" && section != "niir") {
        fail(ErrorCode::Parse, where() + "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) fail(ErrorCode::Parse, where() + "expected key = value");
    const std::string key = trim(std::string_view(text).substr(0, eq));
    const std::string value = trim(std::string_view(text).substr(eq + 1));
    const auto owner = config_section(key);
    if (owner.empty()) fail(ErrorCode::Parse, where() + "unknown key '" + key + "'");
    if (!section.empty() && owner != section) {
      fail(ErrorCode::Parse, where() + "key '" + key + "' belongs in [" + std::string(owner) + "]");
    }
    try {
      set(key, value);
    } catch (const Error& e) {
      throw Error(e.code(), where() + e.what());
    }
  }
}

void ExperimentConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open config file: " + path);
  load(in);
}

std::string ExperimentConfig::to_config_text() const {
  std::ostringstream o;
  std::string model_list;
  for (auto m : kCanonicalOrder) {
    if (!has(m)) continue;
    if (!model_list.empty()) model_list += ',';
    model_list += model_key(m);
  }
  o << "[signal]\n"
    << "amp = " << real_text(signal.amplitude) << '\n'
    << "freq = " << real_text(signal.freq) << '\n'
    << "fs = " << real_text(signal.sample_rate) << '\n'
    << "noise = " << real_text(signal.noise_amp) << '\n'
    << "seed = " << signal.seed << '\n'
    << "format = " << signal.fmt.to_string() << '\n'
    << "[run]\n"
    << "models = " << model_list << '\n'
    << "steps = " << test_steps << '\n'
    << "train-steps = " << train_steps << '\n'
    << "allow-untrained = " << (allow_untrained ? "true" : "false") << '\n'
    << "weight-storage = " << (weight_storage == WeightStorage::Crossbar ? "crossbar" : "registers") << '\n'
    << "[fir]\n";
  if (fir_coeffs.empty()) {
    o << "fir-taps = " << fir_taps << '\n' << "fir-cutoff = " << real_text(fir_cutoff) << '\n';
  } else {
    o << "fir-coeffs = " << fir_coeffs << '\n';
  }
  o << "[iir]\n"
    << "iir-cutoff = " << real_text(iir_cutoff) << '\n'
    << "iir-q = " << real_text(iir_q) << '\n'
    << "iir-form = " << (iir_form == IirForm::Df2t ? "df2t" : "biquad") << '\n'
    << "[nfir]\n"
    << "nfir-hidden = " << nfir_hidden << '\n'
    << "nfir-mu = " << real_text(nfir_mu) << '\n'
    << "nfir-seed = " << nfir_weight_seed() << '\n'
    << "[niir]\n"
    << "niir-hidden = " << niir_hidden << '\n'
    << "niir-mu = " << real_text(niir_mu) << '\n'
    << "niir-seed = " << niir_weight_seed() << '\n';
  return o.str();
}

// ---------------------------------------------------------------- run

const ModelRun& ExperimentResult::run(ModelKind m) const {
  for (const auto& r : runs) {
    if (r.kind == m) return r;
  }
  fail(ErrorCode::InvalidArgument, "model '" + std::string(model_key(m)) + "' was not run");
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const QFormat fmt = cfg.signal.fmt;

  SignalConfig stim = cfg.signal;
  stim.seed = cfg.test_seed();
  stim.n_steps = cfg.test_steps;
  const Trace test = gen_test_signal(stim);
  Trace train(fmt);
  if (cfg.train_steps > 0) {
    stim.seed = cfg.train_seed();
    stim.n_steps = cfg.train_steps;
    train = gen_test_signal(stim);
  }

  // Golden reference: computed once, shared by every MSE below.
  const auto fir_coeffs = cfg.fir_coeffs.empty()
                              ? design_lowpass_fir(cfg.fir_taps, cfg.fir_cutoff, fmt)
                              : quantize_all(load_coefficients(cfg.fir_coeffs), fmt);
  FirFilter fir(fir_coeffs);
  const Trace fir_train = fir.run(train);
  fir.reset();
  const Trace golden = fir.run(test);

  Trace iir_train(fmt), iir_test(fmt);
  if (cfg.has(ModelKind::Iir) || cfg.has(ModelKind::NeuroIir)) {
    const QFormat coeff_fmt = iir_coeff_format(fmt);
    const BiquadCoeffs bq = design_lowpass_biquad(cfg.iir_cutoff, cfg.iir_q, coeff_fmt);
    auto run_iir = [&](const Trace& x) {
      if (cfg.iir_form == IirForm::Df2t) return IirDf2t(biquad_to_iir(bq, coeff_fmt), fmt).run(x);
      return Biquad(bq, fmt).run(x);
    };
    iir_train = run_iir(train);
    iir_test = run_iir(test);
  }

  std::vector<std::function<ModelRun()>> jobs;
  for (auto m : kCanonicalOrder) {
    if (!cfg.has(m)) continue;
    switch (m) {
      case ModelKind::Fir:
        jobs.emplace_back([&] { return ModelRun{ModelKind::Fir, golden, {}, std::nullopt, {}}; });
        break;
      case ModelKind::Iir:
        jobs.emplace_back([&] { return ModelRun{ModelKind::Iir, iir_test, {}, std::nullopt, {}}; });
        break;
      case ModelKind::NeuroFir:
        jobs.emplace_back([&] {
          return attributed(ModelKind::NeuroFir, [&] {
            NeuroFir net(NeuroFirConfig{fir.size(), cfg.nfir_hidden, cfg.nfir_mu,
                                        cfg.nfir_weight_seed(), fmt, cfg.weight_storage});
            return train_and_test(ModelKind::NeuroFir, net, train, fir_train, test, golden);
          });
        });
        break;
      case ModelKind::NeuroIir:
        jobs.emplace_back([&] {
          return attributed(ModelKind::NeuroIir, [&] {
            ElmanConfig ec;
            ec.n_hidden = cfg.niir_hidden;
            ec.mu = cfg.niir_mu;
            ec.seed = cfg.niir_weight_seed();
            ec.fmt = fmt;
            ec.storage = cfg.weight_storage;
            ElmanNet net(ec);
            return train_and_test(ModelKind::NeuroIir, net, train, iir_train, test, iir_test);
          });
        });
        break;
    }
  }

  ExperimentResult result{cfg, test, golden, {}, {}};
  if (cfg.parallel && jobs.size() > 1) {
    std::vector<std::future<ModelRun>> pending;
    pending.reserve(jobs.size());
    for (auto& job : jobs) pending.push_back(std::async(std::launch::async, job));
    for (auto& f : pending) result.runs.push_back(f.get());
  } else {
    for (auto& job : jobs) result.runs.push_back(job());
  }
  for (const auto& r : result.runs) result.mse_table[r.kind] = mse(r.test_output, golden);
  return result;
}

// ---------------------------------------------------------------- output

void write_experiment_csv(std::ostream& out, const ExperimentResult& r) {
  out << "n,x";
  for (const auto& run : r.runs) out << ",y_" << model_key(run.kind);
  out << ",x_raw";
  for (const auto& run : r.runs) out << ",y_" << model_key(run.kind) << "_raw";
  out << '\n';
  for (std::size_t n = 0; n < r.test_input.size(); ++n) {
    out << n << ',' << format_sig9(r.test_input.value(n));
    for (const auto& run : r.runs) out << ',' << format_sig9(run.test_output.value(n));
    out << ',' << r.test_input.raw()[n];
    for (const auto& run : r.runs) out << ',' << run.test_output.raw()[n];
    out << '\n';
  }
}

void emit_csv(const ExperimentResult& r, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path);
  write_experiment_csv(out, r);
  out.flush();
  if (!out) fail(ErrorCode::Io, "write failed: " + path);
}

std::string emit_report(const ExperimentResult& r) {
  const auto& c = r.config;
  std::ostringstream o;
  char buf[160];
  o << "MSE relative to classical FIR golden reference\n\n";
  std::snprintf(buf, sizeof buf, "  %-18s %12s\n", "model", "MSE");
  o << buf;
  for (const auto& [kind, value] : r.mse_table) {
    std::snprintf(buf, sizeof buf, "  %-18s %12.6f\n", std::string(model_label(kind)).c_str(), value);
    o << buf;
  }
  o << "\nformat " << c.signal.fmt.to_string() << ", train " << c.train_steps << " steps, test "
    << c.test_steps << " steps\n";
  o << "seeds: stimulus train " << c.train_seed() << ", test " << c.test_seed()
    << ", nfir weights " << c.nfir_weight_seed() << ", niir weights " << c.niir_weight_seed()
    << '\n';
  o << "\n# configuration (load with --config to reproduce this run)\n" << c.to_config_text();
  return o.str();
}

}  // namespace neurodsp
