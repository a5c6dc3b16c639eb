// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spdcstat/click_model.hpp"
#include "spdcstat/dark_counts.hpp"
#include "spdcstat/pair_distributions.hpp"

namespace spdcstat {

struct SimConfig {
  std::uint64_t n_gates = 1;
  std::uint64_t seed = 0;
  PairDistribution dist = PairDistribution::thermal(0.0);
  DetectionSetup setup;
  /// Worker threads; 0 picks the hardware concurrency. Results do not depend
  /// on this value.
  unsigned workers = 0;

  void validate() const;
};

struct SimResult {
  std::uint64_t n_gates = 0;
  std::uint64_t n_s1 = 0;
  std::uint64_t n_s2 = 0;
  std::uint64_t n_coinc = 0;
  /// count / n_gates * R
  RawRates rates;

  friend bool operator==(const SimResult&, const SimResult&) = default;
};

/// Pair number above which a gate is rejected with a range error.
inline constexpr std::uint64_t kMaxPairsPerGate = 1000000;

/*!
 * Gate-by-gate photon-level simulation.
 *
 * Each gate draws m pairs; each of the 2m photons survives with probability T,
 * goes to arm 1 or 2 with probability 1/2 and registers with probability
 * eta of that arm. A detector clicks when at least one photon registers or its
 * dark Bernoulli (dark_k / R) fires. Gate g uses its own counter-based stream
 * keyed by (seed, g), so the result is independent of how gates are split
 * among workers.
 */
SimResult simulate(const SimConfig& config);

struct SweepPoint {
  double power_mw = 0;
  double mean_pairs = 0;
  SimResult result;
};

/// One simulate() per pump power; point i is seeded with mix_seed(seed, i).
std::vector<SweepPoint> sweep(std::span<const double> powers_mw, const PumpMapping& map,
                              const DetectionSetup& setup,
                              std::uint64_t n_gates_per_point, std::uint64_t seed,
                              unsigned workers = 0);

}  // namespace spdcstat
