// neurodsp command-line front end. Talks to the library only through the C API.

#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "neurodsp/neurodsp.h"

namespace {

struct CliFailure {
  std::string message;
};

void check(nd_status s) {
  if (s != ND_OK) {
    const char* detail = nd_last_error();
    throw CliFailure{std::string(nd_status_string(s)) + (*detail ? ": " : "") + detail};
  }
}

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

// ---- run

struct RunArgs {
  std::string config;
  std::string out;
  std::string weights_prefix;
  bool allow_untrained = false;
  std::map<std::string, std::string> values;
};

void add_run(CLI::App& app, RunArgs& a) {
  auto* run = app.add_subcommand("run", "train/test experiment and MSE table");
  run->add_option("--config", a.config, "config file; flags override its values");
  run->add_option("--out", a.out, "write the test-phase CSV here");
  run->add_option("--weights-out", a.weights_prefix,
                  "write trained weight snapshots to PREFIX_nfir.txt / PREFIX_niir.txt");
  run->add_flag("--allow-untrained", a.allow_untrained, "permit --train-steps 0");
  const char* keys[] = {"models",     "steps",      "train-steps", "seed",        "amp",
                        "freq",       "fs",         "noise",       "format",      "weight-storage",
                        "fir-taps",   "fir-cutoff", "fir-coeffs",  "iir-cutoff",  "iir-q",
                        "iir-form",   "nfir-hidden", "nfir-mu",    "nfir-seed",   "niir-hidden",
                        "niir-mu",    "niir-seed"};
  for (const char* k : keys) {
    run->add_option_function<std::string>(
        std::string("--") + k, [&a, k](const std::string& v) { a.values[k] = v; },
        std::string("config key ") + k);
  }
}

int do_run(const RunArgs& a) {
  nd_config* cfg = nullptr;
  nd_result* res = nullptr;
  try {
    check(nd_config_create(&cfg));
    if (!a.config.empty()) check(nd_config_load_file(cfg, a.config.c_str()));
    for (const auto& [k, v] : a.values) check(nd_config_set(cfg, k.c_str(), v.c_str()));
    if (a.allow_untrained) check(nd_config_set(cfg, "allow-untrained", "true"));
    check(nd_experiment_run(cfg, &res));
    if (!a.out.empty()) check(nd_result_write_csv(res, a.out.c_str()));
    if (!a.weights_prefix.empty()) {
      for (const char* m : {"nfir", "niir"}) {
        double unused = 0;
        if (nd_result_mse(res, m, &unused) != ND_OK) continue;
        const std::string path = a.weights_prefix + "_" + m + ".txt";
        check(nd_result_write_weights(res, m, path.c_str()));
      }
    }
    std::size_t needed = 0;
    check(nd_result_report(res, nullptr, 0, &needed));
    std::string text(needed, '\0');
    check(nd_result_report(res, text.data(), text.size(), &needed));
    std::fputs(text.c_str(), stdout);
  } catch (...) {
    nd_result_destroy(res);
    nd_config_destroy(cfg);
    throw;
  }
  nd_result_destroy(res);
  nd_config_destroy(cfg);
  return 0;
}

// ---- design sallen-key

struct SallenKeyArgs {
  double alpha = 7, beta = 6, cap = 15e-9, ra = 1e3;
  std::optional<double> r;
  std::string csv;
};

void add_design(CLI::App& app, SallenKeyArgs& a) {
  auto* design = app.add_subcommand("design", "analog prototype design");
  design->require_subcommand(1);
  auto* sk = design->add_subcommand("sallen-key", "Sallen-Key low-pass calculator");
  sk->add_option("--alpha", a.alpha, "gain digit alpha")->capture_default_str();
  sk->add_option("--beta", a.beta, "frequency digit beta")->capture_default_str();
  sk->add_option("--cap", a.cap, "capacitance C (F)")->capture_default_str();
  sk->add_option("--ra", a.ra, "resistor R_A (ohm)")->capture_default_str();
  sk->add_option("--r", a.r, "use this R for the transfer coefficients");
  sk->add_option("--csv", a.csv, "also write the table as CSV");
}

int do_sallen_key(const SallenKeyArgs& a) {
  nd_sallen_key d{};
  check(nd_sallen_key_design(a.alpha, a.beta, a.cap, a.ra, a.r.value_or(0.0), &d));
  const std::vector<std::pair<const char*, std::string>> rows{
      {"K", num(d.k)},
      {"f_c (Hz)", num(d.f_c)},
      {"R (ohm)", num(d.r)},
      {"R_B (ohm)", num(d.r_b)},
      {"R used (ohm)", num(a.r.value_or(d.r))},
      {"b0", num(d.b0)},
      {"a1", num(d.a1)},
      {"a0", num(d.a0)},
      {"stable", d.stable ? "yes" : "no"},
  };
  for (const auto& [name, value] : rows) std::printf("  %-14s %16s\n", name, value.c_str());
  if (!a.csv.empty()) {
    std::FILE* f = std::fopen(a.csv.c_str(), "wb");
    if (f == nullptr) throw CliFailure{"cannot write " + a.csv};
    std::fprintf(f, "alpha,beta,c,r_a,k,f_c,r,r_b,r_used,b0,a1,a0,stable\n");
    std::fprintf(f, "%s,%s,%s,%s,%s,%s,%s,%s,%s,%s,%s,%s,%d\n", num(d.alpha).c_str(),
                 num(d.beta).c_str(), num(d.c).c_str(), num(d.r_a).c_str(), num(d.k).c_str(),
                 num(d.f_c).c_str(), num(d.r).c_str(), num(d.r_b).c_str(),
                 num(a.r.value_or(d.r)).c_str(), num(d.b0).c_str(), num(d.a1).c_str(),
                 num(d.a0).c_str(), d.stable);
    if (std::fclose(f) != 0) throw CliFailure{"write failed: " + a.csv};
  }
  return 0;
}

// ---- sweep memristor

struct SweepArgs {
  nd_memristor_params p{};
  double vamp = 1.0, vfreq = 50, dt = 1e-5;
  std::size_t periods = 3;
  std::string out = "iv.csv";
};

void add_sweep(CLI::App& app, SweepArgs& a) {
  nd_memristor_default_params(&a.p);
  auto* sweep = app.add_subcommand("sweep", "device sweeps");
  sweep->require_subcommand(1);
  auto* m = sweep->add_subcommand("memristor", "sinusoidal I-V sweep");
  m->add_option("--ron", a.p.r_on, "R_on (ohm)")->capture_default_str();
  m->add_option("--roff", a.p.r_off, "R_off (ohm)")->capture_default_str();
  m->add_option("--k", a.p.k, "state mobility k")->capture_default_str();
  m->add_option("--x0", a.p.x0, "initial state")->capture_default_str();
  m->add_option("--vamp", a.vamp, "drive amplitude (V)")->capture_default_str();
  m->add_option("--vfreq", a.vfreq, "drive frequency (Hz)")->capture_default_str();
  m->add_option("--dt", a.dt, "time step (s)")->capture_default_str();
  m->add_option("--periods", a.periods, "number of drive periods")->capture_default_str();
  m->add_option("--out", a.out, "CSV path")->capture_default_str();
}

int do_sweep(const SweepArgs& a) {
  double area = 0;
  check(nd_memristor_write_sweep(&a.p, a.vamp, a.vfreq, a.dt, a.periods, a.out.c_str(), &area));
  std::printf("wrote %s, loop area %s V*A\n", a.out.c_str(), num(area).c_str());
  return 0;
}

// ---- freq fir

struct FreqArgs {
  std::string coeffs;
  std::size_t taps = 15;
  double cutoff = 0.1;
  std::size_t points = 512;
  std::string format = "q16.15";
  std::string out = "resp.csv";
};

void add_freq(CLI::App& app, FreqArgs& a) {
  auto* freq = app.add_subcommand("freq", "frequency response");
  freq->require_subcommand(1);
  auto* f = freq->add_subcommand("fir", "FIR magnitude sweep over [0, pi]");
  f->add_option("--coeffs", a.coeffs, "coefficient file (default: designed low-pass)");
  f->add_option("--taps", a.taps, "taps of the designed low-pass")->capture_default_str();
  f->add_option("--cutoff", a.cutoff, "cutoff of the designed low-pass (cycles/sample)")
      ->capture_default_str();
  f->add_option("--points", a.points, "frequency points")->capture_default_str();
  f->add_option("--format", a.format, "coefficient Q-format")->capture_default_str();
  f->add_option("--out", a.out, "CSV path")->capture_default_str();
}

int do_freq(const FreqArgs& a) {
  nd_qformat fmt{};
  check(nd_qformat_parse(a.format.c_str(), &fmt));
  nd_fir* fir = nullptr;
  check(a.coeffs.empty() ? nd_fir_design_lowpass(a.taps, a.cutoff, fmt, &fir)
                         : nd_fir_load(a.coeffs.c_str(), fmt, &fir));
  double dc = 0;
  const nd_status s = nd_fir_write_freq_response(fir, a.points, a.out.c_str());
  if (s == ND_OK) nd_fir_dc_gain(fir, &dc);
  nd_fir_destroy(fir);
  check(s);
  std::printf("wrote %s, DC gain %s\n", a.out.c_str(), num(dc).c_str());
  return 0;
}

// ---- lif

struct LifArgs {
  nd_lif_params p{};
  double current = 2.0;
  std::size_t steps = 1000;
  std::string out = "spikes.csv";
};

void add_lif(CLI::App& app, LifArgs& a) {
  nd_lif_default_params(&a.p);
  auto* l = app.add_subcommand("lif", "leaky integrate-and-fire neuron under constant drive");
  l->add_option("--tau", a.p.tau, "membrane time constant (s)")->capture_default_str();
  l->add_option("--vth", a.p.v_th, "threshold")->capture_default_str();
  l->add_option("--r", a.p.r_mem, "membrane resistance")->capture_default_str();
  l->add_option("--dt", a.p.dt, "time step (s)")->capture_default_str();
  l->add_option("--vrest", a.p.v_rest, "rest potential")->capture_default_str();
  l->add_option("--vreset", a.p.v_reset, "reset potential")->capture_default_str();
  l->add_option("--tref", a.p.t_ref, "refractory period (s)")->capture_default_str();
  l->add_option("--current", a.current, "input current")->capture_default_str();
  l->add_option("--steps", a.steps, "number of steps")->capture_default_str();
  l->add_option("--out", a.out, "CSV path")->capture_default_str();
}

int do_lif(const LifArgs& a) {
  check(nd_lif_write_spikes(&a.p, a.current, a.steps, a.out.c_str()));
  std::size_t n = 0;
  check(nd_lif_run_const(&a.p, a.current, a.steps, nullptr, &n));
  std::printf("wrote %s, %zu spikes in %zu steps\n", a.out.c_str(), n, a.steps);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"neurodsp: fixed-point DSP filters and their neuromorphic counterparts"};
  app.require_subcommand(1);
  app.set_version_flag("--version", nd_version());

  RunArgs run;
  SallenKeyArgs sk;
  SweepArgs sweep;
  FreqArgs freq;
  LifArgs lif;
  add_run(app, run);
  add_design(app, sk);
  add_sweep(app, sweep);
  add_freq(app, freq);
  add_lif(app, lif);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (app.got_subcommand("run")) return do_run(run);
    if (app.got_subcommand("design")) return do_sallen_key(sk);
    if (app.got_subcommand("sweep")) return do_sweep(sweep);
    if (app.got_subcommand("freq")) return do_freq(freq);
    if (app.got_subcommand("lif")) return do_lif(lif);
  } catch (const CliFailure& f) {
    std::fprintf(stderr, "neurodsp: %s\n", f.message.c_str());
    return 1;
  }
  return 0;
}
