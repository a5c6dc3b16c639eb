// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spdcstat/click_model.hpp"
#include "spdcstat/dark_counts.hpp"
#include "spdcstat/pair_distributions.hpp"

namespace spdcstat {

/// One pump-power point of a measured sweep.
struct CountRecord {
  double power_mw = 0;
  RawRates raw;
  std::optional<PhotonRates> corrected;

  /// Rates used for fitting: corrected when present, otherwise raw.
  PhotonRates observed() const;
};

enum class Verdict { Thermal, Poissonian, Intermediate };

const char* to_string(Verdict verdict) noexcept;

struct FitResult {
  PairKind model_kind = PairKind::Thermal;
  double pump_constant = 0;
  std::vector<double> per_point_means;
  double rss = 0;
  std::optional<Verdict> verdict;
  double verdict_ratio = 0;

  /// "1/mW" for thermal, "pairs/mW" for Poissonian.
  const char* constant_units() const noexcept;
};

struct CurvePoint {
  double mean_pairs = 0;
  double p_single = 0;
  double p_coinc = 0;
};

enum class Spacing { Linear, Log };

/// Mean pair number whose single-click probability (at least one detector)
/// equals p_single_target, found by bisection on [0, 1e8].
double invert_mean(double p_single_target, PairKind kind, const DetectionSetup& setup);

std::vector<CurvePoint> curve(PairKind kind, const DetectionSetup& setup,
                              double mean_min, double mean_max, std::size_t n_points,
                              Spacing spacing = Spacing::Linear);

/// Sum over records of squared differences between modelled and observed
/// per-gate probabilities (s1, s2, coincidence) for a given pump constant.
/// Returns +inf when the constant drives a mean out of the finite range.
double fit_objective(std::span<const CountRecord> records, PairKind kind,
                     const DetectionSetup& setup, double pump_constant);

/// Least-squares estimate of the pump constant over [1e-6, 1e3].
FitResult fit_pump_constant(std::span<const CountRecord> records, PairKind kind,
                            const DetectionSetup& setup);

struct VerdictThresholds {
  double thermal_at_most = 1.0 / 3.0;     // rss_thermal / rss_poissonian
  double poissonian_at_least = 3.0;
};

struct Classification {
  FitResult thermal;
  FitResult poissonian;
  Verdict verdict = Verdict::Intermediate;
  double ratio = 1;  // rss_thermal / rss_poissonian

  /// Fit of the favoured model (thermal for Intermediate when ratio <= 1)
  /// with verdict fields filled in.
  FitResult best() const;
};

Classification classify(std::span<const CountRecord> records,
                        const DetectionSetup& setup,
                        const VerdictThresholds& thresholds = {});

/// Optical power carried by mean_pairs pairs per pulse at rep_rate_hz, each
/// photon at wavelength_nm.
double pairs_to_power(double mean_pairs_per_pulse, double wavelength_nm,
                      double rep_rate_hz);

inline constexpr double kPlanck = 6.62607015e-34;      // J s
inline constexpr double kSpeedOfLight = 299792458.0;  // m / s

}  // namespace spdcstat
