#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "neurodsp/experiment.hpp"

using namespace neurodsp;

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

ExperimentConfig short_config() {
  ExperimentConfig c;
  c.train_steps = 400;
  c.test_steps = 300;
  return c;
}

}  // namespace

TEST_CASE("fir alone is its own reference") {
  ExperimentConfig c;
  c.models = {ModelKind::Fir};
  const auto r = run_experiment(c);
  REQUIRE(r.mse_table.size() == 1);
  CHECK(r.mse_table.at(ModelKind::Fir) == 0.0);
  CHECK(r.run(ModelKind::Fir).test_output == r.golden);
  const std::string report = emit_report(r);
  CHECK(report.find("Classical FIR          0.000000") != std::string::npos);
  CHECK(report.find("Classical IIR") == std::string::npos);
}

TEST_CASE("default ordering pieces") {
  const auto r = run_experiment(ExperimentConfig{});
  CHECK(r.mse_table.size() == 4);
  CHECK(r.mse_table.at(ModelKind::Iir) > 0.0);
  CHECK(r.mse_table.at(ModelKind::NeuroIir) > 0.0);
  CHECK(r.golden.size() == 2000);
  for (const auto& run : r.runs) CHECK(run.test_output.size() == 2000);
  CHECK(r.run(ModelKind::NeuroFir).train_sq_error.size() == 2000);
  CHECK(r.run(ModelKind::NeuroIir).test_mse_vs_desired.has_value());
}

TEST_CASE("replay is byte identical, parallel or not") {
  auto c = short_config();
  std::ostringstream a, b, s;
  write_experiment_csv(a, run_experiment(c));
  write_experiment_csv(b, run_experiment(c));
  c.parallel = false;
  write_experiment_csv(s, run_experiment(c));
  CHECK(a.str() == b.str());
  CHECK(a.str() == s.str());
}

TEST_CASE("csv layout and mse round trip") {
  auto c = short_config();
  c.models = {ModelKind::NeuroIir, ModelKind::Fir, ModelKind::Iir};
  const auto r = run_experiment(c);
  std::stringstream out;
  write_experiment_csv(out, r);
  std::string line;
  std::getline(out, line);
  CHECK(line == "n,x,y_fir,y_iir,y_niir,x_raw,y_fir_raw,y_iir_raw,y_niir_raw");
  std::size_t rows = 0;
  double sum_iir = 0, sum_niir = 0, sum_raw_iir = 0;
  while (std::getline(out, line)) {
    const auto cells = split(line);
    REQUIRE(cells.size() == 9);
    const double fir = std::stod(cells[2]);
    sum_iir += (std::stod(cells[3]) - fir) * (std::stod(cells[3]) - fir);
    sum_niir += (std::stod(cells[4]) - fir) * (std::stod(cells[4]) - fir);
    const double raw_diff = std::ldexp(std::stod(cells[7]) - std::stod(cells[6]), -15);
    sum_raw_iir += raw_diff * raw_diff;
    ++rows;
  }
  CHECK(rows == c.test_steps);
  CHECK(std::abs(sum_iir / rows - r.mse_table.at(ModelKind::Iir)) <= 1e-9);
  CHECK(std::abs(sum_niir / rows - r.mse_table.at(ModelKind::NeuroIir)) <= 1e-9);
  CHECK(sum_raw_iir / rows == r.mse_table.at(ModelKind::Iir));
}

TEST_CASE("emit_csv reports the path on failure") {
  const auto r = run_experiment(short_config());
  try {
    emit_csv(r, "/nonexistent-dir/out.csv");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Io);
    CHECK(std::string(e.what()).find("/nonexistent-dir/out.csv") != std::string::npos);
  }
}

TEST_CASE("report embeds seeds and a reloadable config") {
  auto c = short_config();
  c.signal.seed = 17;
  c.niir_seed = 5;
  const auto r = run_experiment(c);
  const std::string report = emit_report(r);
  CHECK(report.find("stimulus train 17, test 18") != std::string::npos);
  CHECK(report.find("nfir weights 118") != std::string::npos);
  CHECK(report.find("niir weights 5") != std::string::npos);

  // The config echo alone reproduces the run.
  const auto pos = report.find("[signal]");
  REQUIRE(pos != std::string::npos);
  std::istringstream echo(report.substr(pos));
  ExperimentConfig again;
  again.load(echo);
  std::ostringstream a, b;
  write_experiment_csv(a, r);
  write_experiment_csv(b, run_experiment(again));
  CHECK(a.str() == b.str());
}

TEST_CASE("config parsing") {
  ExperimentConfig c;
  std::istringstream in(
      "# experiment\n"
      "[signal]\n amp = 0.5\nseed=9\nformat = q24.16\n"
      "[run]\nmodels = fir, niir\nsteps = 100\n"
      "[iir]\niir-form = df2t\n");
  c.load(in);
  CHECK(c.signal.amplitude == 0.5);
  CHECK(c.signal.seed == 9);
  CHECK(c.signal.fmt == kDefaultFormat);
  CHECK(c.models == std::vector<ModelKind>{ModelKind::Fir, ModelKind::NeuroIir});
  CHECK(c.test_steps == 100);
  CHECK(c.iir_form == IirForm::Df2t);

  std::istringstream wrong_section("[fir]\namp = 0.5\n");
  CHECK_THROWS_AS(c.load(wrong_section), Error);
  std::istringstream unknown("bogus = 1\n");
  CHECK_THROWS_AS(c.load(unknown), Error);
  CHECK_THROWS_AS(c.set("steps", "-3"), Error);
  CHECK_THROWS_AS(c.set("models", ""), Error);
  CHECK_THROWS_AS(c.set("models", "fir,fir"), Error);
  CHECK_THROWS_AS(c.set("models", "fir,lstm"), Error);
  CHECK_THROWS_AS(c.set("allow-untrained", "maybe"), Error);
  CHECK(config_section("niir-mu") == "niir");
  CHECK(config_section("nope").empty());
}

TEST_CASE("validation") {
  ExperimentConfig c;
  c.test_steps = 0;
  CHECK_THROWS_AS(run_experiment(c), Error);
  c = {};
  c.train_steps = 0;
  CHECK_THROWS_AS(run_experiment(c), Error);
  c.allow_untrained = true;
  const auto r = run_experiment(c);
  CHECK(r.run(ModelKind::NeuroFir).test_output == Trace(kQ15, std::vector<std::int64_t>(2000, 0)));
  c = {};
  c.fir_taps = 14;
  CHECK_THROWS_AS(run_experiment(c), Error);
}

TEST_CASE("model errors carry attribution") {
  ExperimentConfig c = short_config();
  c.models = {ModelKind::NeuroIir};
  c.niir_mu = 1e-9;
  try {
    run_experiment(c);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).rfind("niir: ", 0) == 0);
  }
}

TEST_CASE("df2t and biquad forms give the same iir row") {
  auto c = short_config();
  c.models = {ModelKind::Iir};
  const auto a = run_experiment(c);
  c.iir_form = IirForm::Df2t;
  const auto b = run_experiment(c);
  CHECK(a.run(ModelKind::Iir).test_output == b.run(ModelKind::Iir).test_output);
}

TEST_CASE("coefficient file drives the golden filter") {
  const auto path = std::filesystem::temp_directory_path() / "neurodsp_exp_coeffs.txt";
  {
    std::ofstream f(path);
    f << "# 3-tap average\n0.25\n0.5\n0.25\n";
  }
  auto c = short_config();
  c.models = {ModelKind::Fir, ModelKind::NeuroFir};
  c.fir_coeffs = path.string();
  const auto r = run_experiment(c);
  CHECK(r.mse_table.at(ModelKind::Fir) == 0.0);
  CHECK(r.run(ModelKind::NeuroFir).weights.find("dims 8x3") != std::string::npos);
  std::filesystem::remove(path);
}
