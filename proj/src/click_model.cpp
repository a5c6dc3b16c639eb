// SPDX-License-Identifier: Apache-2.0
#include "spdcstat/click_model.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace spdcstat {

namespace {

bool in_unit(double x) { return x >= 0 && x <= 1; }

void check_detector(int detector) {
  if (detector != 1 && detector != 2) {
    fail(ErrorCode::Domain, "detector index must be 1 or 2");
  }
}

void check_t_eta(double t_eta1, double t_eta2) {
  if (!in_unit(t_eta1) || !in_unit(t_eta2)) {
    fail(ErrorCode::Domain, "per-arm detection probabilities must lie in [0, 1]");
  }
}

// 1 - (1 - p)^n without cancellation at small p, cached and grown on demand.
class MissComplements {
 public:
  explicit MissComplements(double p)
      : certain_(p >= 1), log_miss_(certain_ ? 0.0 : std::log1p(-p)) {}

  double operator[](std::size_t n) {
    while (cache_.size() <= n) {
      const std::size_t k = cache_.size();
      cache_.push_back(certain_ ? (k > 0 ? 1.0 : 0.0)
                                : -std::expm1(static_cast<double>(k) * log_miss_));
    }
    return cache_[n];
  }

 private:
  bool certain_;
  double log_miss_;
  std::vector<double> cache_;
};

// Binomial(2m, 1/2) weights C(2m, n) / 4^m, built outward from the mode so no
// intermediate underflows for large m. Weights below kWeightFloor times the
// mode are left at zero; [lo, hi] bounds the nonzero window.
constexpr double kWeightFloor = 1e-20;

struct SplitWindow {
  std::size_t lo = 0;
  std::size_t hi = 0;
};

SplitWindow split_weights(std::uint64_t m, std::vector<double>& w) {
  const std::size_t photons = 2 * m;
  w.assign(photons + 1, 0.0);
  const double dm = static_cast<double>(m);
  w[m] = std::exp(std::lgamma(2 * dm + 1) - 2 * std::lgamma(dm + 1) -
                  2 * dm * std::numbers::ln2);
  const double floor = w[m] * kWeightFloor;
  SplitWindow win{m, m};
  for (std::size_t n = m; n < photons && w[n] > floor; ++n) {
    w[n + 1] = w[n] * static_cast<double>(photons - n) / static_cast<double>(n + 1);
    win.hi = n + 1;
  }
  for (std::size_t n = m; n > 0 && w[n] > floor; --n) {
    w[n - 1] = w[n] * static_cast<double>(n) / static_cast<double>(photons - n + 1);
    win.lo = n - 1;
  }
  return win;
}

// Sum over pair number of p(m) times the conditional click probability
// assembled from the binomial split of the 2m photons. Summation runs at least
// to truncation_limit() and continues until the remaining pair-number tail is
// negligible against the running total, so tiny results keep full relative
// accuracy.
constexpr double kRelativeTail = 1e-17;

template <class Inner>
double direct_pair_sum(const PairDistribution& dist, Inner&& inner) {
  const std::uint64_t m_min = truncation_limit(dist);
  std::vector<double> weights;
  double total = 0;
  for (std::uint64_t m = 0; m <= kTruncationCap; ++m) {
    const double p = pmf(dist, m);
    if (p > 0) {
      const auto win = split_weights(m, weights);
      total += p * inner(m, weights, win);
    }
    if (m >= m_min && (total == 0 || tail_bound(dist, m) <= kRelativeTail * total)) break;
  }
  return total;
}

// Neumaier compensated sum; the enumeration adds up to 5^8 terms.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0;
  double carry_ = 0;
};

double binomial_coefficient(std::uint64_t n, std::uint64_t k) {
  double c = 1;
  for (std::uint64_t j = 1; j <= k; ++j) {
    c = c * static_cast<double>(n - k + j) / static_cast<double>(j);
  }
  return std::round(c);
}

}  // namespace

void DetectionSetup::validate() const {
  auto bad = [](const char* name, const std::string& why) {
    fail(ErrorCode::Validation, std::string(name) + " " + why);
  };
  if (!(gate_rate_hz > 0) || !std::isfinite(gate_rate_hz)) {
    bad("gate_rate_hz", "must be positive and finite");
  }
  if (!in_unit(transmittivity)) bad("transmittivity", "must lie in [0, 1]");
  if (!in_unit(eta1)) bad("eta1", "must lie in [0, 1]");
  if (!in_unit(eta2)) bad("eta2", "must lie in [0, 1]");
  if (!(dark1_hz >= 0 && dark1_hz < gate_rate_hz)) {
    bad("dark1_hz", "must lie in [0, gate_rate_hz)");
  }
  if (!(dark2_hz >= 0 && dark2_hz < gate_rate_hz)) {
    bad("dark2_hz", "must lie in [0, gate_rate_hz)");
  }
}

double single_probability(const PairDistribution& dist, const DetectionSetup& setup,
                          int detector) {
  setup.validate();
  check_detector(detector);
  const double t_eta = detector == 1 ? setup.t_eta1() : setup.t_eta2();
  return pgf_even_complement(dist, 1.0 - 0.5 * t_eta);
}

double coincidence_probability(const PairDistribution& dist,
                               const DetectionSetup& setup) {
  setup.validate();
  // 1 - G(q1) - G(q2) + G(q12) cancels badly at small T eta. With
  // x = mean (1 - q^2) and a_k = T eta_k / 2, x1 + x2 - x12 = 2 mean a1 a2
  // exactly, which gives sums of positive terms.
  const double mean = dist.mean();
  const double a1 = 0.5 * setup.t_eta1();
  const double a2 = 0.5 * setup.t_eta2();
  const double x1 = mean * a1 * (2.0 - a1);
  const double x2 = mean * a2 * (2.0 - a2);
  const double x12 = mean * (a1 + a2) * (2.0 - a1 - a2);
  const double g = 2.0 * mean * a1 * a2;
  if (dist.kind() == PairKind::Thermal) {
    return (g + x1 * x2 * (2.0 + x12)) / ((1.0 + x1) * (1.0 + x2) * (1.0 + x12));
  }
  return std::expm1(-x1) * std::expm1(-x2) - std::exp(-x12) * std::expm1(-g);
}

ClickProbabilities click_probabilities(const PairDistribution& dist,
                                       const DetectionSetup& setup) {
  ClickProbabilities out;
  out.p_s1 = single_probability(dist, setup, 1);
  out.p_s2 = single_probability(dist, setup, 2);
  out.p_coinc = coincidence_probability(dist, setup);
  out.p_single = out.p_s1 + out.p_s2 - out.p_coinc;
  return out;
}

double single_rate(const PairDistribution& dist, const DetectionSetup& setup,
                   int detector) {
  return setup.gate_rate_hz * single_probability(dist, setup, detector);
}

double coincidence_rate(const PairDistribution& dist, const DetectionSetup& setup) {
  return setup.gate_rate_hz * coincidence_probability(dist, setup);
}

double single_probability_direct(const PairDistribution& dist,
                                 const DetectionSetup& setup, int detector) {
  setup.validate();
  check_detector(detector);
  const double t_eta = detector == 1 ? setup.t_eta1() : setup.t_eta2();
  MissComplements clicks(t_eta);
  return direct_pair_sum(dist, [&](std::uint64_t, const std::vector<double>& w,
                                   SplitWindow win) {
    double inner = 0;
    for (std::size_t n = win.lo; n <= win.hi; ++n) inner += w[n] * clicks[n];
    return inner;
  });
}

double coincidence_probability_direct(const PairDistribution& dist,
                                      const DetectionSetup& setup) {
  setup.validate();
  MissComplements clicks1(setup.t_eta1());
  MissComplements clicks2(setup.t_eta2());
  return direct_pair_sum(dist, [&](std::uint64_t m, const std::vector<double>& w,
                                   SplitWindow win) {
    double inner = 0;
    for (std::size_t n = win.lo; n <= win.hi; ++n) {
      inner += w[n] * clicks1[n] * clicks2[2 * m - n];
    }
    return inner;
  });
}

ConditionalClicks per_pair_click_terms(std::uint64_t m, double t_eta1, double t_eta2,
                                       PerPairMethod method) {
  check_t_eta(t_eta1, t_eta2);
  ConditionalClicks out;
  if (m == 0) return out;

  if (method == PerPairMethod::ClosedForm) {
    const double photons = 2.0 * static_cast<double>(m);
    // q^(2m) with q = 1 - x/2; x <= 2 keeps log1p finite except at x = 2
    auto power = [&](double x) {
      return x >= 2 ? 0.0 : std::exp(photons * std::log1p(-0.5 * x));
    };
    out.p_click1 = -std::expm1(photons * std::log1p(-0.5 * t_eta1));
    out.p_click2 = -std::expm1(photons * std::log1p(-0.5 * t_eta2));
    out.p_coinc = out.p_click1 + out.p_click2 - (1.0 - power(t_eta1 + t_eta2));
    if (out.p_coinc < 0) out.p_coinc = 0;
    return out;
  }

  if (m > kBinomialTermCap) {
    fail(ErrorCode::Range, "binomial per-pair evaluation supports m <= " +
                               std::to_string(kBinomialTermCap) + ", got " +
                               std::to_string(m));
  }
  const std::uint64_t photons = 2 * m;
  const double norm = std::ldexp(1.0, -static_cast<int>(photons));
  for (std::uint64_t n = 0; n <= photons; ++n) {
    const double w = binomial_coefficient(photons, n) * norm;
    const double c1 = 1.0 - std::pow(1.0 - t_eta1, static_cast<double>(n));
    const double c2_self = 1.0 - std::pow(1.0 - t_eta2, static_cast<double>(n));
    const double c2 = 1.0 - std::pow(1.0 - t_eta2, static_cast<double>(photons - n));
    out.p_click1 += w * c1;
    out.p_click2 += w * c2_self;
    out.p_coinc += w * c1 * c2;
  }
  return out;
}

ConditionalClicks enumerate_bruteforce(std::uint64_t m, double transmittivity,
                                       double eta1, double eta2) {
  if (m > kEnumerationCap) {
    fail(ErrorCode::Range, "enumeration supports m <= " +
                               std::to_string(kEnumerationCap) + ", got " +
                               std::to_string(m));
  }
  if (!in_unit(transmittivity) || !in_unit(eta1) || !in_unit(eta2)) {
    fail(ErrorCode::Domain, "transmittivity and efficiencies must lie in [0, 1]");
  }
  const double t = transmittivity;
  // lost, arm1 detected, arm1 missed, arm2 detected, arm2 missed
  const std::array<double, 5> fate = {1 - t, t * eta1 / 2, t * (1 - eta1) / 2,
                                      t * eta2 / 2, t * (1 - eta2) / 2};
  const std::size_t photons = 2 * m;
  std::size_t outcomes = 1;
  for (std::size_t i = 0; i < photons; ++i) outcomes *= fate.size();

  CompensatedSum s1;
  CompensatedSum s2;
  CompensatedSum s12;
  for (std::size_t index = 0; index < outcomes; ++index) {
    std::size_t code = index;
    double prob = 1;
    bool click1 = false;
    bool click2 = false;
    for (std::size_t i = 0; i < photons; ++i) {
      const std::size_t f = code % fate.size();
      code /= fate.size();
      prob *= fate[f];
      click1 |= (f == 1);
      click2 |= (f == 3);
    }
    if (click1) s1.add(prob);
    if (click2) s2.add(prob);
    if (click1 && click2) s12.add(prob);
  }
  return {s1.value(), s2.value(), s12.value()};
}

}  // namespace spdcstat
