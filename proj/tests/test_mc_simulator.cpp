// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "spdcstat/click_model.hpp"
#include "spdcstat/counter_rng.hpp"
#include "spdcstat/mc_simulator.hpp"

using namespace spdcstat;

namespace {

DetectionSetup split_setup(double t, double eta1, double eta2, double dark1 = 0,
                           double dark2 = 0) {
  DetectionSetup s;
  s.transmittivity = t;
  s.eta1 = eta1;
  s.eta2 = eta2;
  s.dark1_hz = dark1;
  s.dark2_hz = dark2;
  return s;
}

void check_against_model(const SimResult& r, const PairDistribution& dist,
                         const DetectionSetup& s, double n_sigma) {
  const auto model = click_probabilities(dist, s);
  const double n = static_cast<double>(r.n_gates);
  auto within = [&](std::uint64_t count, double p) {
    const double sigma = oracle::binomial_sigma(p, n);
    const double freq = static_cast<double>(count) / n;
    CAPTURE(freq);
    CAPTURE(p);
    CHECK(std::fabs(freq - p) <= n_sigma * sigma);
  };
  within(r.n_s1, model.p_s1);
  within(r.n_s2, model.p_s2);
  within(r.n_coinc, model.p_coinc);
}

}  // namespace

TEST_CASE("Philox4x32-10 known-answer vectors") {
  using C = Philox4x32::Counter;
  CHECK(Philox4x32::apply(C{0, 0, 0, 0}, {0, 0}) ==
        C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::apply(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                          {0xffffffff, 0xffffffff}) ==
        C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::apply(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                          {0xa4093822, 0x299f31d0}) ==
        C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("counter streams are independent of evaluation order") {
  CounterRng a(42, 17);
  std::vector<std::uint64_t> first;
  for (int i = 0; i < 9; ++i) first.push_back(a());
  CounterRng other(42, 18);
  other();
  CounterRng b(42, 17);
  for (int i = 0; i < 9; ++i) CHECK(b() == first[i]);
  CHECK(mix_seed(1, 0) != mix_seed(1, 1));
  CHECK(mix_seed(1, 0) != mix_seed(2, 0));
}

TEST_CASE("no transmission and no dark counts: no clicks") {
  SimConfig c{100000, 3, PairDistribution::thermal(5), split_setup(0, 1, 1), 0};
  const auto r = simulate(c);
  CHECK(r.n_s1 == 0);
  CHECK(r.n_s2 == 0);
  CHECK(r.n_coinc == 0);
}

TEST_CASE("dark counts alone") {
  const double gate = 316000;
  SimConfig c{1000000, 9, PairDistribution::thermal(0), split_setup(1, 0.5, 0.5, 0.01 * gate, 0),
              0};
  const auto r = simulate(c);
  CHECK(std::fabs(r.n_s1 / 1e6 - 0.01) < 3e-4);
  CHECK(r.n_s2 == 0);
  CHECK(r.n_coinc == 0);
  CHECK(r.rates.s1_hz == doctest::Approx(r.n_s1 * gate / 1e6));

  // both detectors dark: coincidences at d1 d2
  SimConfig both{2000000, 10, PairDistribution::poissonian(0),
                 split_setup(1, 0.5, 0.5, 0.05 * gate, 0.04 * gate), 0};
  const auto rb = simulate(both);
  const double p = 0.05 * 0.04;
  CHECK(std::fabs(rb.n_coinc / 2e6 - p) <= 4 * oracle::binomial_sigma(p, 2e6));
  CHECK(std::fabs(rb.n_s1 / 2e6 - 0.05) <= 4 * oracle::binomial_sigma(0.05, 2e6));
}

TEST_CASE("agreement with the analytic model over a grid") {
  std::uint64_t seed = 1000;
  for (auto kind : {PairKind::Thermal, PairKind::Poissonian}) {
    for (double mean : {0.1, 1.0, 10.0}) {
      for (double t_eta : {0.02, 0.1}) {
        CAPTURE(mean);
        CAPTURE(t_eta);
        const auto s = split_setup(0.5, 2 * t_eta, 2 * t_eta);
        const PairDistribution dist(kind, mean);
        const auto r = simulate({2000000, seed++, dist, s, 0});
        check_against_model(r, dist, s, 4.0);
      }
    }
  }
}

TEST_CASE("dark counts and photons combine as the forward model predicts") {
  const auto s = split_setup(0.8, 0.15, 0.1, 3000, 5000);
  const auto dist = PairDistribution::thermal(0.7);
  const auto r = simulate({3000000, 77, dist, s, 0});
  const auto p = click_probabilities(dist, s);
  const auto raw = apply_dark_forward({p.p_s1 * s.gate_rate_hz, p.p_s2 * s.gate_rate_hz,
                                       p.p_coinc * s.gate_rate_hz},
                                      s.dark1_hz, s.dark2_hz, s.gate_rate_hz);
  const double n = 3e6;
  for (auto [count, rate] : {std::pair{r.n_s1, raw.s1_hz}, std::pair{r.n_s2, raw.s2_hz},
                             std::pair{r.n_coinc, raw.c_hz}}) {
    const double q = rate / s.gate_rate_hz;
    CHECK(std::fabs(count / n - q) <= 4 * oracle::binomial_sigma(q, n));
  }
}

TEST_CASE("result is independent of worker count") {
  const auto s = split_setup(0.6, 0.3, 0.2, 1000, 2000);
  SimConfig c{300001, 1234, PairDistribution::poissonian(2.5), s, 1};
  const auto one = simulate(c);
  for (unsigned w : {2u, 3u, 8u, 0u}) {
    c.workers = w;
    CHECK(simulate(c) == one);
  }
  c.seed = 1235;
  CHECK_FALSE(simulate(c) == one);
}

TEST_CASE("swapping detector parameters swaps singles distributionally") {
  const auto s = split_setup(0.9, 0.3, 0.1, 2000, 500);
  auto swapped = s;
  std::swap(swapped.eta1, swapped.eta2);
  std::swap(swapped.dark1_hz, swapped.dark2_hz);
  const auto dist = PairDistribution::thermal(1.5);
  const double n = 1e6;
  const auto a = simulate({1000000, 5, dist, s, 0});
  const auto b = simulate({1000000, 6, dist, swapped, 0});
  // two-sample proportion z-tests at 1e-3 two-sided (|z| < 3.29)
  auto z = [&](std::uint64_t x, std::uint64_t y) {
    const double p = (x + y) / (2 * n);
    return (x / n - y / n) / std::sqrt(p * (1 - p) * 2 / n);
  };
  CHECK(std::fabs(z(a.n_s1, b.n_s2)) < 3.29);
  CHECK(std::fabs(z(a.n_s2, b.n_s1)) < 3.29);
  CHECK(std::fabs(z(a.n_coinc, b.n_coinc)) < 3.29);
}

TEST_CASE("sweep maps powers through the pump constant") {
  const auto s = split_setup(0.5, 0.2, 0.2);
  CHECK(sweep({}, {PairKind::Thermal, 0.09}, s, 10, 1).empty());

  const std::vector<double> zero = {0.0};
  const auto z = sweep(zero, {PairKind::Poissonian, 2.0}, s, 10000, 1);
  REQUIRE(z.size() == 1);
  CHECK(z[0].result.n_s1 == 0);
  CHECK(z[0].result.n_coinc == 0);

  const std::vector<double> powers = {1, 4, 9};
  const auto pts = sweep(powers, {PairKind::Thermal, 0.09}, s, 1000000, 8);
  REQUIRE(pts.size() == 3);
  // sinh^2 of 0.3, 0.6, 0.9
  const double expected[] = {0.0927326091211, 0.405327783662, 1.05373658816};
  for (int i = 0; i < 3; ++i) {
    CHECK(pts[i].mean_pairs == doctest::Approx(expected[i]).epsilon(1e-11));
    check_against_model(pts[i].result, PairDistribution::thermal(pts[i].mean_pairs), s, 4.0);
  }
  // per-point seeds differ
  CHECK(pts[0].result.n_s1 != pts[1].result.n_s1);
}

TEST_CASE("pair-number cap") {
  SimConfig c{10, 1, PairDistribution::poissonian(2e6), split_setup(0, 1, 1), 1};
  try {
    simulate(c);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Range);
  }
  SimConfig bad{0, 1, PairDistribution::thermal(1), split_setup(1, 1, 1), 1};
  CHECK_THROWS_AS(simulate(bad), Error);
}
