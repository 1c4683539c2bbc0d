#include "doctest.h"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "neurodsp/neurodsp.h"

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::filesystem::path tmp(const char* name) { return std::filesystem::temp_directory_path() / name; }

}  // namespace

TEST_CASE("status strings and errors") {
  CHECK(std::string(nd_status_string(ND_OK)) == "ok");
  nd_qformat q{};
  CHECK(nd_qformat_parse("q16.15", &q) == ND_OK);
  CHECK(q.width == 16);
  CHECK(q.frac == 15);
  CHECK(std::string(nd_last_error()).empty());
  CHECK(nd_qformat_parse("banana", &q) == ND_ERR_PARSE);
  CHECK(std::strlen(nd_last_error()) > 0);
  CHECK(nd_qformat_parse(nullptr, &q) == ND_ERR_INVALID_ARGUMENT);
}

TEST_CASE("fixed point") {
  const nd_qformat q{16, 15};
  std::int64_t raw = 0;
  CHECK(nd_quantize(0.5, q, &raw) == ND_OK);
  CHECK(raw == 16384);
  double v = 0;
  CHECK(nd_dequantize(-32768, q, &v) == ND_OK);
  CHECK(v == -1.0);
  CHECK(nd_dequantize(40000, q, &v) == ND_ERR_OUT_OF_RANGE);
  CHECK(nd_sat_add(30000, 10000, q, &raw) == ND_OK);
  CHECK(raw == 32767);
  CHECK(nd_sat_mul(-32768, -32768, q, &raw) == ND_OK);
  CHECK(raw == 32767);
  CHECK(nd_quantize(0.5, nd_qformat{4, 9}, &raw) == ND_ERR_INVALID_ARGUMENT);
}

TEST_CASE("fir handle") {
  const double h[] = {0.25, 0.25, 0.25, 0.25};
  nd_fir* f = nullptr;
  REQUIRE(nd_fir_create(h, 4, {16, 15}, &f) == ND_OK);
  std::size_t n = 0;
  CHECK(nd_fir_size(f, &n) == ND_OK);
  CHECK(n == 4);
  std::int64_t y = 0;
  CHECK(nd_fir_step(f, 16384, &y) == ND_OK);
  CHECK(y == 4096);
  double g = 0;
  CHECK(nd_fir_dc_gain(f, &g) == ND_OK);
  CHECK(g == 1.0);
  double re = 0, im = 0;
  CHECK(nd_fir_freq_response(f, 5.0, &re, &im) == ND_ERR_OUT_OF_RANGE);
  const auto path = tmp("nd_capi_resp.csv");
  CHECK(nd_fir_write_freq_response(f, 5, path.c_str()) == ND_OK);
  const std::string csv = slurp(path);
  CHECK(csv.rfind("k,omega,re,im,mag,gain_db\n0,0,1,0,1,0\n", 0) == 0);
  // Box filter has a zero at pi/2.
  const auto row = csv.find("\n2,");
  REQUIRE(row != std::string::npos);
  double k = 0, omega = 0, zre = 0, zim = 0, mag = 1;
  REQUIRE(std::sscanf(csv.c_str() + row + 1, "%lf,%lf,%lf,%lf,%lf", &k, &omega, &zre, &zim, &mag) == 5);
  CHECK(mag < 1e-12);
  nd_fir_destroy(f);
  std::filesystem::remove(path);

  CHECK(nd_fir_load("/nonexistent/taps.txt", {16, 15}, &f) == ND_ERR_IO);
  CHECK(nd_fir_design_lowpass(15, 0.1, {16, 15}, &f) == ND_OK);
  nd_fir_destroy(f);
}

TEST_CASE("biquad handle") {
  nd_biquad* b = nullptr;
  REQUIRE(nd_biquad_design_lowpass(0.1, 0.7071, {16, 15}, &b) == ND_OK);
  std::int64_t y = 1;
  CHECK(nd_biquad_step(b, 0, &y) == ND_OK);
  CHECK(y == 0);
  // DC gain is exactly one: a held input settles onto itself.
  for (int i = 0; i < 500; ++i) nd_biquad_step(b, 10000, &y);
  CHECK(y == 10000);
  nd_biquad_destroy(b);
  double db = 0;
  CHECK(nd_gain_db(10.0, &db) == ND_OK);
  CHECK(db == doctest::Approx(20.0));
  CHECK(nd_gain_db(0.0, &db) == ND_ERR_OUT_OF_RANGE);
}

TEST_CASE("analog, lif, memristor, time") {
  nd_sallen_key sk{};
  CHECK(nd_sallen_key_design(7, 6, 15e-9, 1e3, 2.2e3, &sk) == ND_OK);
  CHECK(sk.k == 5.5);
  CHECK(sk.r_b == 4500.0);
  CHECK(sk.stable == 0);
  CHECK(nd_sallen_key_design(-2, 6, 15e-9, 1e3, 0, &sk) == ND_ERR_INVALID_ARGUMENT);

  nd_lif_params p{};
  nd_lif_default_params(&p);
  std::vector<std::uint8_t> spikes(100);
  std::size_t count = 0;
  CHECK(nd_lif_run_const(&p, 2.0, 100, spikes.data(), &count) == ND_OK);
  CHECK(count > 0);
  p.dt = 1.0;
  CHECK(nd_lif_run_const(&p, 2.0, 10, nullptr, &count) == ND_ERR_INVALID_ARGUMENT);

  nd_memristor_params m{};
  nd_memristor_default_params(&m);
  double g = 0;
  CHECK(nd_memristor_conductance(&m, 1.0, &g) == ND_OK);
  CHECK(g == 0.01);
  CHECK(nd_memristor_conductance(&m, 1.5, &g) == ND_ERR_OUT_OF_RANGE);
  const double gm[] = {0.001, 0.002, 0.003, 0.004}, v[] = {1, 2};
  double i[2];
  CHECK(nd_crossbar_mac(2, 2, gm, 1e-4, 0.01, v, i) == ND_OK);
  CHECK(i[0] == doctest::Approx(0.007));
  double gp[2], gn[2], alpha = 0;
  const double w[] = {1.0, -0.5};
  CHECK(nd_program_weights(2, 1, w, 1.0 / 16000, 0.01, 256, gp, gn, &alpha) == ND_OK);
  CHECK(gp[0] == 0.01);

  double t = 0;
  CHECK(nd_time_register(25e-6, 100e-6, &t) == ND_OK);
  CHECK(t == doctest::Approx(75e-6));
  CHECK(nd_time_amplifier(60e-6, 100e-6, 2.0, &t) == ND_ERR_OUT_OF_RANGE);
  const double parts[] = {10e-6, 20e-6, 30e-6};
  CHECK(nd_time_adder(parts, 3, 100e-6, &t) == ND_OK);
  CHECK(t == doctest::Approx(40e-6));
  double out[3];
  CHECK(nd_z_delay(parts, 3, 100e-6, 1.0, out) == ND_OK);
  CHECK(out[0] == 0.0);
}

TEST_CASE("experiment handles") {
  nd_config* c = nullptr;
  REQUIRE(nd_config_create(&c) == ND_OK);
  CHECK(nd_config_set(c, "models", "fir,nfir") == ND_OK);
  CHECK(nd_config_set(c, "train-steps", "300") == ND_OK);
  CHECK(nd_config_set(c, "steps", "200") == ND_OK);
  CHECK(nd_config_set(c, "no-such-key", "1") == ND_ERR_PARSE);
  CHECK(nd_config_load_file(c, "/nonexistent.cfg") == ND_ERR_IO);

  nd_result* r = nullptr;
  REQUIRE(nd_experiment_run(c, &r) == ND_OK);
  double mse = -1;
  CHECK(nd_result_mse(r, "fir", &mse) == ND_OK);
  CHECK(mse == 0.0);
  CHECK(nd_result_mse(r, "iir", &mse) == ND_ERR_INVALID_ARGUMENT);

  std::size_t n = 0;
  CHECK(nd_result_train_error(r, "nfir", nullptr, 0, &n) == ND_OK);
  CHECK(n == 300);

  std::size_t needed = 0;
  CHECK(nd_result_report(r, nullptr, 0, &needed) == ND_OK);
  std::vector<char> small(4);
  CHECK(nd_result_report(r, small.data(), small.size(), &needed) == ND_ERR_OUT_OF_RANGE);
  std::vector<char> buf(needed);
  CHECK(nd_result_report(r, buf.data(), buf.size(), &needed) == ND_OK);
  CHECK(std::string(buf.data()).find("Neuromorphic FIR") != std::string::npos);

  const auto weights = tmp("nd_capi_w.txt");
  CHECK(nd_result_write_weights(r, "nfir", weights.c_str()) == ND_OK);
  CHECK(slurp(weights).rfind("format q16.15 dims 8x15\n", 0) == 0);
  CHECK(nd_result_write_weights(r, "fir", weights.c_str()) == ND_ERR_INVALID_ARGUMENT);
  std::filesystem::remove(weights);

  const auto csv = tmp("nd_capi_run.csv");
  CHECK(nd_result_write_csv(r, csv.c_str()) == ND_OK);
  CHECK(slurp(csv).rfind("n,x,y_fir,y_nfir,x_raw,y_fir_raw,y_nfir_raw\n", 0) == 0);
  std::filesystem::remove(csv);
  CHECK(nd_result_write_csv(r, "/nonexistent/x.csv") == ND_ERR_IO);

  nd_result_destroy(r);
  nd_config_destroy(c);
}
