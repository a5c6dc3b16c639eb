// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "spdcstat/pair_distributions.hpp"

namespace spdcstat {

/// Two gated threshold detectors behind a 50/50 coupler.
struct DetectionSetup {
  double gate_rate_hz = 316000.0;  // R
  double transmittivity = 1.0;     // T, shared by both arms
  double eta1 = 1.0;
  double eta2 = 1.0;
  double dark1_hz = 0.0;
  double dark2_hz = 0.0;

  void validate() const;

  double t_eta1() const noexcept { return transmittivity * eta1; }
  double t_eta2() const noexcept { return transmittivity * eta2; }
};

/// Per-gate click probabilities.
struct ClickProbabilities {
  double p_s1 = 0;
  double p_s2 = 0;
  double p_coinc = 0;
  double p_single = 0;  // at least one detector clicks: p_s1 + p_s2 - p_coinc
};

/// Probability that detector k (1 or 2) clicks in a gate, dark counts excluded.
double single_probability(const PairDistribution& dist, const DetectionSetup& setup,
                          int detector);
double coincidence_probability(const PairDistribution& dist,
                               const DetectionSetup& setup);
ClickProbabilities click_probabilities(const PairDistribution& dist,
                                       const DetectionSetup& setup);

/// S_k in Hz.
double single_rate(const PairDistribution& dist, const DetectionSetup& setup,
                   int detector);
/// C in Hz.
double coincidence_rate(const PairDistribution& dist, const DetectionSetup& setup);

//---------------------------------------------------------------------------//
// Verification paths. These evaluate the infinite pair sums term by term,
// with the inner binomial sum over how the 2m photons split between the two
// arms. The pair sum runs past truncation_limit() until the remaining tail is
// below 1e-17 of the partial sum.

double single_probability_direct(const PairDistribution& dist,
                                 const DetectionSetup& setup, int detector);
double coincidence_probability_direct(const PairDistribution& dist,
                                      const DetectionSetup& setup);

/// Click probabilities conditioned on exactly m pairs in the gate.
struct ConditionalClicks {
  double p_click1 = 0;
  double p_click2 = 0;
  double p_coinc = 0;
};

enum class PerPairMethod {
  Binomial,    // explicit binomial split sum, m <= kBinomialTermCap
  ClosedForm,  // 1 - q_k^(2m), 1 - q1^(2m) - q2^(2m) + q12^(2m)
};

inline constexpr std::uint64_t kBinomialTermCap = 12;
inline constexpr std::uint64_t kEnumerationCap = 4;

ConditionalClicks per_pair_click_terms(std::uint64_t m, double t_eta1, double t_eta2,
                                       PerPairMethod method = PerPairMethod::Binomial);

/// Exhaustive enumeration over the five fates of each of the 2m photons
/// (lost, arm 1 detected, arm 1 missed, arm 2 detected, arm 2 missed).
ConditionalClicks enumerate_bruteforce(std::uint64_t m, double transmittivity,
                                       double eta1, double eta2);

}  // namespace spdcstat
