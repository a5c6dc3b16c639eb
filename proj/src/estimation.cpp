// SPDX-License-Identifier: Apache-2.0
#include "spdcstat/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

namespace spdcstat {

namespace {

constexpr double kBisectionUpper = 1e8;
constexpr double kBisectionRelTol = 1e-10;
constexpr double kConstantLower = 1e-6;
constexpr double kConstantUpper = 1e3;
constexpr int kScanPoints = 181;
constexpr double kLogConstantTol = 1e-9;

double no_click_argument(const DetectionSetup& setup) {
  return 1.0 - 0.5 * (setup.t_eta1() + setup.t_eta2());
}

double combined_single(PairKind kind, double mean, const DetectionSetup& setup) {
  return pgf_even_complement(PairDistribution(kind, mean), no_click_argument(setup));
}

double square(double x) { return x * x; }

}  // namespace

PhotonRates CountRecord::observed() const {
  if (corrected) return *corrected;
  return {raw.s1_hz, raw.s2_hz, raw.c_hz};
}

const char* to_string(Verdict verdict) noexcept {
  switch (verdict) {
    case Verdict::Thermal: return "thermal";
    case Verdict::Poissonian: return "poissonian";
    case Verdict::Intermediate: return "intermediate";
  }
  return "unknown";
}

const char* FitResult::constant_units() const noexcept {
  return model_kind == PairKind::Thermal ? "1/mW" : "pairs/mW";
}

double invert_mean(double p_single_target, PairKind kind, const DetectionSetup& setup) {
  setup.validate();
  if (!(p_single_target > 0 && p_single_target < 1)) {
    fail(ErrorCode::Domain, "target single-click probability must lie in (0, 1)");
  }
  if (!(setup.t_eta1() + setup.t_eta2() > 0)) {
    fail(ErrorCode::Domain, "no photon can be detected with this setup");
  }
  double lo = 0;
  double hi = kBisectionUpper;
  if (combined_single(kind, hi, setup) < p_single_target) {
    fail(ErrorCode::Domain, "target single-click probability " +
                                std::to_string(p_single_target) +
                                " is unreachable below mean " +
                                std::to_string(kBisectionUpper));
  }
  for (int iter = 0; iter < 400 && hi - lo > kBisectionRelTol * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (combined_single(kind, mid, setup) < p_single_target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<CurvePoint> curve(PairKind kind, const DetectionSetup& setup,
                              double mean_min, double mean_max, std::size_t n_points,
                              Spacing spacing) {
  setup.validate();
  if (!(mean_min >= 0) || !(mean_min < mean_max) || !std::isfinite(mean_max)) {
    fail(ErrorCode::Range, "curve needs 0 <= mean_min < mean_max");
  }
  if (n_points < 2) fail(ErrorCode::Range, "curve needs at least two points");
  if (spacing == Spacing::Log && !(mean_min > 0)) {
    fail(ErrorCode::Range, "log spacing needs mean_min > 0");
  }

  std::vector<CurvePoint> out;
  out.reserve(n_points);
  const double last = static_cast<double>(n_points - 1);
  for (std::size_t i = 0; i < n_points; ++i) {
    const double f = static_cast<double>(i) / last;
    double mean = spacing == Spacing::Linear
                      ? mean_min + f * (mean_max - mean_min)
                      : std::exp(std::log(mean_min) +
                                 f * (std::log(mean_max) - std::log(mean_min)));
    if (i == 0) mean = mean_min;
    if (i + 1 == n_points) mean = mean_max;
    const auto probs = click_probabilities(PairDistribution(kind, mean), setup);
    out.push_back({mean, probs.p_single, probs.p_coinc});
  }
  return out;
}

double fit_objective(std::span<const CountRecord> records, PairKind kind,
                     const DetectionSetup& setup, double pump_constant) {
  const PumpMapping map{kind, pump_constant};
  const double r = setup.gate_rate_hz;
  double rss = 0;
  for (const auto& rec : records) {
    double mean = 0;
    try {
      mean = mean_from_pump(map, rec.power_mw);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Numeric) {
        return std::numeric_limits<double>::infinity();
      }
      throw;
    }
    const auto model = click_probabilities(PairDistribution(kind, mean), setup);
    const auto obs = rec.observed();
    rss += square(model.p_s1 - obs.s1_hz / r) + square(model.p_s2 - obs.s2_hz / r) +
           square(model.p_coinc - obs.c_hz / r);
  }
  return rss;
}

FitResult fit_pump_constant(std::span<const CountRecord> records, PairKind kind,
                            const DetectionSetup& setup) {
  setup.validate();
  std::set<double> positive_powers;
  bool any_signal = false;
  for (const auto& rec : records) {
    if (!(rec.power_mw >= 0) || !std::isfinite(rec.power_mw)) {
      fail(ErrorCode::Input, "record power must be finite and nonnegative");
    }
    if (rec.power_mw > 0) positive_powers.insert(rec.power_mw);
    const auto obs = rec.observed();
    any_signal |= obs.s1_hz != 0 || obs.s2_hz != 0 || obs.c_hz != 0;
  }
  if (positive_powers.size() < 2) {
    fail(ErrorCode::Input, "fit needs at least two records with distinct positive powers");
  }
  if (!any_signal) {
    fail(ErrorCode::DegenerateFit, "all observed count rates are zero");
  }

  auto objective = [&](double log_constant) {
    return fit_objective(records, kind, setup, std::exp(log_constant));
  };

  // Coarse scan picks the basin; golden section refines inside it.
  const double lo = std::log(kConstantLower);
  const double hi = std::log(kConstantUpper);
  const double step = (hi - lo) / (kScanPoints - 1);
  std::vector<double> scan(kScanPoints);
  for (int i = 0; i < kScanPoints; ++i) scan[i] = objective(lo + step * i);
  const auto best_it = std::min_element(scan.begin(), scan.end());
  const auto worst = *std::max_element(scan.begin(), scan.end());
  if (!(worst > *best_it)) {
    fail(ErrorCode::DegenerateFit, "objective is flat in the pump constant");
  }
  const int best = static_cast<int>(best_it - scan.begin());

  double a = lo + step * std::max(best - 1, 0);
  double b = lo + step * std::min(best + 1, kScanPoints - 1);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = objective(x1);
  double f2 = objective(x2);
  while (b - a > kLogConstantTol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = objective(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = objective(x2);
    }
  }
  double log_best = 0.5 * (a + b);
  double f_best = objective(log_best);
  if (scan[best] < f_best) {
    log_best = lo + step * best;
    f_best = scan[best];
  }
  if (!std::isfinite(f_best)) {
    fail(ErrorCode::Numeric, "fit objective is not finite at its minimum");
  }

  FitResult fit;
  fit.model_kind = kind;
  fit.pump_constant = std::exp(log_best);
  fit.rss = f_best;
  const PumpMapping map{kind, fit.pump_constant};
  fit.per_point_means.reserve(records.size());
  for (const auto& rec : records) {
    fit.per_point_means.push_back(mean_from_pump(map, rec.power_mw));
  }
  return fit;
}

FitResult Classification::best() const {
  FitResult out;
  if (verdict == Verdict::Thermal) {
    out = thermal;
  } else if (verdict == Verdict::Poissonian) {
    out = poissonian;
  } else {
    out = ratio <= 1 ? thermal : poissonian;
  }
  out.verdict = verdict;
  out.verdict_ratio = ratio;
  return out;
}

Classification classify(std::span<const CountRecord> records,
                        const DetectionSetup& setup,
                        const VerdictThresholds& thresholds) {
  if (!(thresholds.thermal_at_most > 0) ||
      !(thresholds.thermal_at_most <= thresholds.poissonian_at_least)) {
    fail(ErrorCode::Domain, "verdict thresholds must satisfy 0 < thermal <= poissonian");
  }
  Classification out;
  out.thermal = fit_pump_constant(records, PairKind::Thermal, setup);
  out.poissonian = fit_pump_constant(records, PairKind::Poissonian, setup);

  const double rt = out.thermal.rss;
  const double rp = out.poissonian.rss;
  if (rt == 0 && rp == 0) {
    out.ratio = 1;
  } else if (rp == 0) {
    out.ratio = std::numeric_limits<double>::infinity();
  } else {
    out.ratio = rt / rp;
  }

  if (out.ratio <= thresholds.thermal_at_most) {
    out.verdict = Verdict::Thermal;
  } else if (out.ratio >= thresholds.poissonian_at_least) {
    out.verdict = Verdict::Poissonian;
  } else {
    out.verdict = Verdict::Intermediate;
  }
  for (FitResult* fit : {&out.thermal, &out.poissonian}) {
    fit->verdict = out.verdict;
    fit->verdict_ratio = out.ratio;
  }
  return out;
}

double pairs_to_power(double mean_pairs_per_pulse, double wavelength_nm,
                      double rep_rate_hz) {
  if (!(mean_pairs_per_pulse >= 0) || !std::isfinite(mean_pairs_per_pulse)) {
    fail(ErrorCode::Domain, "mean pair number must be finite and nonnegative");
  }
  if (!(wavelength_nm > 0) || !std::isfinite(wavelength_nm)) {
    fail(ErrorCode::Domain, "wavelength must be positive");
  }
  if (!(rep_rate_hz > 0) || !std::isfinite(rep_rate_hz)) {
    fail(ErrorCode::Domain, "repetition rate must be positive");
  }
  const double photon_energy_j = kPlanck * kSpeedOfLight / (wavelength_nm * 1e-9);
  return mean_pairs_per_pulse * 2.0 * photon_energy_j * rep_rate_hz;
}

}  // namespace spdcstat
