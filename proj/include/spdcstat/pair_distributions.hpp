// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <random>

#include "spdcstat/error.hpp"

namespace spdcstat {

enum class PairKind { Thermal, Poissonian };

const char* to_string(PairKind kind) noexcept;

//---------------------------------------------------------------------------//
/*!
 * Number law of photon pairs produced in one gate pulse.
 *
 * Thermal:    p(m) = mu^m / (mu + 1)^(m + 1)   (single two-mode squeezed vacuum)
 * Poissonian: p(m) = nu^m exp(-nu) / m!        (many distinguishable processes)
 *
 * The mean is the average number of pairs per pulse for both kinds. For the
 * thermal law the squeezing parameter is r = asinh(sqrt(mu)).
 */
class PairDistribution {
 public:
  PairDistribution(PairKind kind, double mean);

  static PairDistribution thermal(double mu) { return {PairKind::Thermal, mu}; }
  static PairDistribution poissonian(double nu) {
    return {PairKind::Poissonian, nu};
  }

  PairKind kind() const noexcept { return kind_; }
  double mean() const noexcept { return mean_; }
  double squeezing() const;

 private:
  PairKind kind_;
  double mean_;
};

/// Pump-power to mean-pair mapping. Constant is K [1/mW] for thermal light
/// and the pair yield [pairs/mW] for the Poissonian law.
struct PumpMapping {
  PairKind kind;
  double constant;

  void validate() const;
};

/// Largest m_max the truncation policy accepts before raising a range error.
inline constexpr std::uint64_t kTruncationCap = 100000;
/// Target for the neglected tail mass sum_{m > m_max} p(m).
inline constexpr double kTailTolerance = 1e-14;

double pmf(const PairDistribution& dist, std::uint64_t m);
double log_pmf(const PairDistribution& dist, std::uint64_t m);

/// Upper bound on P(M > m) from the analytic tail of each law.
double tail_bound(const PairDistribution& dist, std::uint64_t m);

/// Smallest m with tail_bound(dist, m) < tolerance.
std::uint64_t truncation_limit(const PairDistribution& dist,
                               double tolerance = kTailTolerance);

double mean_from_pump(const PumpMapping& map, double power_mw);

/// G(q) = sum_m p(m) q^(2m) for q in [0, 1].
double pgf_even(const PairDistribution& dist, double q);
/// 1 - G(q), evaluated without cancellation for q near 1.
double pgf_even_complement(const PairDistribution& dist, double q);

//---------------------------------------------------------------------------//
// Sampling

template <class G>
concept Uniform64Source = std::uniform_random_bit_generator<G> &&
    (G::min() == 0) && (G::max() == std::numeric_limits<std::uint64_t>::max());

/// Uniform double on (0, 1]: 53 random bits, never zero.
template <Uniform64Source G>
double uniform_open_closed(G& gen) {
  return (static_cast<double>(gen() >> 11) + 1.0) * 0x1.0p-53;
}

namespace detail {

// Inversion of the Poisson CDF; chunk must stay small enough that exp(-chunk)
// is far from underflow.
template <Uniform64Source G>
std::uint64_t poisson_inversion(double chunk, G& gen) {
  double u = uniform_open_closed(gen);
  double term = std::exp(-chunk);
  double cdf = term;
  std::uint64_t k = 0;
  while (u > cdf) {
    ++k;
    term *= chunk / static_cast<double>(k);
    double next = cdf + term;
    if (next == cdf) break;  // remaining mass below double resolution
    cdf = next;
  }
  return k;
}

inline constexpr double kPoissonChunk = 8.0;

}  // namespace detail

/// Draw a pair number m with probability pmf(dist, m).
template <Uniform64Source G>
std::uint64_t sample(const PairDistribution& dist, G& gen) {
  double mean = dist.mean();
  if (mean == 0) return 0;
  if (dist.kind() == PairKind::Thermal) {
    // Geometric law with success probability 1/(mu + 1): floor(log U / log(mu/(mu+1)))
    double u = uniform_open_closed(gen);
    double draw = std::floor(std::log(u) / -std::log1p(1.0 / mean));
    if (!(draw < 0x1.0p63)) fail(ErrorCode::Numeric, "thermal draw overflow");
    return static_cast<std::uint64_t>(draw);
  }
  // Sum of independent Poisson chunks is Poisson with the summed mean.
  std::uint64_t total = 0;
  double remaining = mean;
  while (remaining > detail::kPoissonChunk) {
    total += detail::poisson_inversion(detail::kPoissonChunk, gen);
    remaining -= detail::kPoissonChunk;
  }
  return total + detail::poisson_inversion(remaining, gen);
}

}  // namespace spdcstat
