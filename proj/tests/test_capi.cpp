// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "spdcstat/spdcstat.h"

namespace fs = std::filesystem;

namespace {

spdc_setup setup_with(double t_eta) {
  return spdc_setup{316000, 1.0, t_eta, t_eta, 0, 0};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "spdcstat_capi_tests";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("status strings and version") {
  CHECK(std::string(spdc_version()).size() > 0);
  for (int s = SPDC_OK; s <= SPDC_E_INTERNAL; ++s) {
    CHECK(std::string(spdc_status_string(static_cast<spdc_status>(s))).size() > 0);
  }
}

TEST_CASE("scalar functions and error reporting") {
  double v = -1;
  CHECK(spdc_pmf(SPDC_MODEL_THERMAL, 1.0, 0, &v) == SPDC_OK);
  CHECK(v == doctest::Approx(0.5));
  CHECK(std::string(spdc_last_error()).empty());

  v = 42;
  CHECK(spdc_pmf(SPDC_MODEL_THERMAL, -1.0, 0, &v) == SPDC_E_DOMAIN);
  CHECK(v == 42);
  CHECK_FALSE(std::string(spdc_last_error()).empty());
  CHECK(spdc_pmf(static_cast<spdc_model>(7), 1.0, 0, &v) == SPDC_E_INVALID_ARGUMENT);
  CHECK(spdc_pmf(SPDC_MODEL_THERMAL, 1.0, 0, nullptr) == SPDC_E_INVALID_ARGUMENT);

  CHECK(spdc_mean_from_pump(SPDC_MODEL_POISSONIAN, 2.0, 3.0, &v) == SPDC_OK);
  CHECK(v == doctest::Approx(6.0));
  CHECK(spdc_pgf_even(SPDC_MODEL_POISSONIAN, 1.0, 0.0, &v) == SPDC_OK);
  CHECK(v == doctest::Approx(std::exp(-1.0)));

  const auto s = setup_with(0.1);
  spdc_click_probabilities p{};
  CHECK(spdc_click_probabilities_eval(SPDC_MODEL_THERMAL, 1.0, &s, &p) == SPDC_OK);
  CHECK(p.p_s1 == doctest::Approx(0.088838).epsilon(1e-5));
  CHECK(p.p_single == doctest::Approx(0.159664).epsilon(1e-5));
  auto bad = s;
  bad.eta1 = 2;
  CHECK(spdc_click_probabilities_eval(SPDC_MODEL_THERMAL, 1.0, &bad, &p) ==
        SPDC_E_VALIDATION);
  CHECK(std::string(spdc_last_error()).find("eta1") != std::string::npos);

  CHECK(spdc_correct_singles(99, 100, 316000, &v) == SPDC_E_NEGATIVE_SIGNAL);
  CHECK(spdc_correct_singles(1000, 50, 316000, &v) == SPDC_OK);
  CHECK(v == doctest::Approx(950.150340));
  CHECK(spdc_correct_coincidence(20, 950.15, 900, 50, 60, 316000, &v) == SPDC_OK);
  CHECK(v == doctest::Approx(19.6840387));

  CHECK(spdc_invert_mean(0.159664, SPDC_MODEL_THERMAL, &s, &v) == SPDC_OK);
  CHECK(v == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(spdc_invert_mean(1.5, SPDC_MODEL_THERMAL, &s, &v) == SPDC_E_DOMAIN);

  CHECK(spdc_pairs_to_power(100, 1550, 8e7, &v) == SPDC_OK);
  char buf[32];
  CHECK(spdc_format_scientific(v, 4, buf, sizeof buf) == SPDC_OK);
  CHECK(std::string(buf) == "2.0505e-9");
  CHECK(spdc_format_number(0.1, buf, 3) == SPDC_E_RANGE);
}

TEST_CASE("curve") {
  const auto s = setup_with(0.1);
  std::vector<spdc_curve_point> pts(3);
  CHECK(spdc_curve(SPDC_MODEL_THERMAL, &s, 0, 2, 3, 0, pts.data()) == SPDC_OK);
  CHECK(pts[1].p_coinc == doctest::Approx(0.0180127).epsilon(1e-5));
  CHECK(spdc_curve(SPDC_MODEL_THERMAL, &s, 2, 1, 3, 0, pts.data()) == SPDC_E_RANGE);
}

TEST_CASE("config handles") {
  spdc_config* c = nullptr;
  REQUIRE(spdc_config_default(&c) == SPDC_OK);
  spdc_setup s{};
  CHECK(spdc_config_setup(c, &s) == SPDC_OK);
  CHECK(s.gate_rate_hz == 316000);
  double rep = 0;
  CHECK(spdc_config_rep_rate_hz(c, &rep) == SPDC_OK);
  CHECK(rep == 8e7);
  spdc_config_free(c);
  spdc_config_free(nullptr);

  const auto path = scratch("bad.cfg");
  std::ofstream(path) << "transmittivity = 1.5\n";
  c = nullptr;
  CHECK(spdc_config_load(path.c_str(), &c) == SPDC_E_VALIDATION);
  CHECK(c == nullptr);
  CHECK(spdc_config_load("/nonexistent/x.cfg", &c) == SPDC_E_IO);
}

TEST_CASE("simulate, sweep, correct, fit and classify through handles") {
  auto s = setup_with(0.1);
  spdc_sim_counts a{};
  spdc_sim_counts b{};
  CHECK(spdc_simulate(SPDC_MODEL_THERMAL, 1.0, &s, 100000, 7, 1, &a) == SPDC_OK);
  CHECK(spdc_simulate(SPDC_MODEL_THERMAL, 1.0, &s, 100000, 7, 4, &b) == SPDC_OK);
  CHECK(a.n_s1 == b.n_s1);
  CHECK(a.n_coinc == b.n_coinc);
  CHECK(a.n_gates == 100000);

  const double unordered[] = {2.0, 1.0};
  spdc_dataset* data = nullptr;
  CHECK(spdc_simulate_sweep(SPDC_MODEL_THERMAL, 0.05, unordered, 2, &s, 1000, 1, 0, &data) ==
        SPDC_E_VALIDATION);
  CHECK(data == nullptr);

  s.dark1_hz = 200;
  s.dark2_hz = 300;
  const double powers[] = {0.1, 0.5, 1, 2, 3, 5, 7.5, 10};
  REQUIRE(spdc_simulate_sweep(SPDC_MODEL_THERMAL, 0.05, powers, 8, &s, 200000, 3, 0, &data) ==
          SPDC_OK);
  CHECK(spdc_dataset_size(data) == 8);
  CHECK(spdc_dataset_validate(data, s.gate_rate_hz) == SPDC_OK);
  spdc_record rec{};
  CHECK(spdc_dataset_record(data, 8, &rec) == SPDC_E_INVALID_ARGUMENT);
  REQUIRE(spdc_dataset_record(data, 0, &rec) == SPDC_OK);
  CHECK(rec.power_mw == 0.1);
  CHECK(rec.has_corrected == 0);

  size_t negatives = 99;
  CHECK(spdc_dataset_correct(data, &s, 0, &negatives) == SPDC_OK);
  CHECK(negatives == 0);
  REQUIRE(spdc_dataset_record(data, 7, &rec) == SPDC_OK);
  CHECK(rec.has_corrected == 1);
  CHECK(rec.s1_ph_hz < rec.s1_hz);

  const auto path = scratch("sweep.csv");
  CHECK(spdc_dataset_write_csv(data, path.c_str()) == SPDC_OK);
  spdc_dataset* back = nullptr;
  REQUIRE(spdc_dataset_read_csv(path.c_str(), &back) == SPDC_OK);
  CHECK(spdc_dataset_size(back) == 8);

  spdc_fit* fit = nullptr;
  REQUIRE(spdc_fit_pump_constant(back, SPDC_MODEL_THERMAL, &s, &fit) == SPDC_OK);
  CHECK(spdc_fit_model(fit) == SPDC_MODEL_THERMAL);
  CHECK(spdc_fit_constant(fit) == doctest::Approx(0.05).epsilon(0.05));
  CHECK(std::string(spdc_fit_constant_units(fit)) == "1/mW");
  CHECK(spdc_fit_num_points(fit) == 8);
  CHECK(spdc_fit_point_mean(fit, 7) > spdc_fit_point_mean(fit, 0));
  CHECK(std::isnan(spdc_fit_point_mean(fit, 8)));
  spdc_fit_free(fit);

  spdc_classification* cls = nullptr;
  CHECK(spdc_classify(back, &s, 3.0, 1.0 / 3.0, &cls) == SPDC_E_DOMAIN);
  REQUIRE(spdc_classify(back, &s, 1.0 / 3.0, 3.0, &cls) == SPDC_OK);
  CHECK(spdc_classification_ratio(cls) > 0);
  const spdc_fit* po = spdc_classification_fit(cls, SPDC_MODEL_POISSONIAN);
  REQUIRE(po != nullptr);
  CHECK(std::string(spdc_fit_constant_units(po)) == "pairs/mW");
  spdc_classification_free(cls);

  spdc_dataset_free(back);
  spdc_dataset_free(data);
  spdc_dataset_free(nullptr);
}

TEST_CASE("dataset read errors") {
  const auto path = scratch("bad.csv");
  std::ofstream(path) << "power_mw,s1_hz,s2_hz,c_hz\n1,1000,900,20\n2,1000,900,2000\n";
  spdc_dataset* d = nullptr;
  CHECK(spdc_dataset_read_csv(path.c_str(), &d) == SPDC_E_VALIDATION);
  CHECK(d == nullptr);
  CHECK(std::string(spdc_last_error()).find("row 2") != std::string::npos);
  CHECK(spdc_dataset_read_csv(nullptr, &d) == SPDC_E_INVALID_ARGUMENT);
}
