// SPDX-License-Identifier: Apache-2.0
#include "spdcstat/pair_distributions.hpp"

#include <cmath>
#include <string>

namespace spdcstat {

const char* to_string(PairKind kind) noexcept {
  return kind == PairKind::Thermal ? "thermal" : "poissonian";
}

PairDistribution::PairDistribution(PairKind kind, double mean)
    : kind_(kind), mean_(mean) {
  if (!(mean >= 0) || !std::isfinite(mean)) {
    fail(ErrorCode::Domain,
         "pair distribution mean must be finite and nonnegative, got " +
             std::to_string(mean));
  }
}

double PairDistribution::squeezing() const {
  if (kind_ != PairKind::Thermal) {
    fail(ErrorCode::Domain, "squeezing parameter is defined for thermal light only");
  }
  return std::asinh(std::sqrt(mean_));
}

void PumpMapping::validate() const {
  if (!(constant > 0) || !std::isfinite(constant)) {
    fail(ErrorCode::Domain, "pump constant must be positive and finite");
  }
}

double log_pmf(const PairDistribution& dist, std::uint64_t m) {
  const double mean = dist.mean();
  const double k = static_cast<double>(m);
  if (mean == 0) {
    return m == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  }
  if (dist.kind() == PairKind::Thermal) {
    return k * std::log(mean) - (k + 1) * std::log1p(mean);
  }
  return k * std::log(mean) - mean - std::lgamma(k + 1);
}

double pmf(const PairDistribution& dist, std::uint64_t m) {
  const double mean = dist.mean();
  if (mean == 0) return m == 0 ? 1.0 : 0.0;
  if (m <= 20) {
    // Direct products are exact enough here and avoid lgamma rounding.
    double value = dist.kind() == PairKind::Thermal ? 1.0 / (1.0 + mean)
                                                    : std::exp(-mean);
    for (std::uint64_t j = 1; j <= m; ++j) {
      value *= dist.kind() == PairKind::Thermal
                   ? mean / (1.0 + mean)
                   : mean / static_cast<double>(j);
    }
    return value;
  }
  return std::exp(log_pmf(dist, m));
}

double tail_bound(const PairDistribution& dist, std::uint64_t m) {
  const double mean = dist.mean();
  if (mean == 0) return 0.0;
  const double next = static_cast<double>(m) + 1.0;
  if (dist.kind() == PairKind::Thermal) {
    // P(M > m) = (mu / (mu + 1))^(m + 1), exactly
    return std::exp(-next * std::log1p(1.0 / mean));
  }
  // Ratio of successive terms beyond m+1 is at most nu/(m+2) < 1, so the
  // tail is dominated by a geometric series starting at p(m+1).
  const double ratio = mean / (next + 1.0);
  if (ratio >= 1.0) return 1.0;
  return pmf(dist, m + 1) / (1.0 - ratio);
}

std::uint64_t truncation_limit(const PairDistribution& dist, double tolerance) {
  if (!(tolerance > 0)) fail(ErrorCode::Domain, "truncation tolerance must be positive");
  const double mean = dist.mean();
  if (mean == 0) return 0;

  std::uint64_t m = 0;
  if (dist.kind() == PairKind::Thermal) {
    double estimate = std::ceil(-std::log(tolerance) / std::log1p(1.0 / mean));
    if (estimate > static_cast<double>(kTruncationCap) + 1) {
      fail(ErrorCode::Range, "thermal truncation exceeds cap for mean " +
                                 std::to_string(mean));
    }
    m = estimate > 1 ? static_cast<std::uint64_t>(estimate) - 1 : 0;
    while (m > 0 && tail_bound(dist, m - 1) < tolerance) --m;
  } else {
    m = static_cast<std::uint64_t>(std::floor(mean));
  }
  while (tail_bound(dist, m) >= tolerance) {
    if (++m > kTruncationCap) {
      fail(ErrorCode::Range, "truncation exceeds cap of " +
                                 std::to_string(kTruncationCap) + " pairs");
    }
  }
  return m;
}

double mean_from_pump(const PumpMapping& map, double power_mw) {
  map.validate();
  if (!(power_mw >= 0) || !std::isfinite(power_mw)) {
    fail(ErrorCode::Domain, "pump power must be finite and nonnegative");
  }
  if (map.kind == PairKind::Poissonian) return map.constant * power_mw;
  const double s = std::sinh(std::sqrt(map.constant * power_mw));
  const double mean = s * s;
  if (!std::isfinite(mean)) {
    fail(ErrorCode::Numeric, "thermal mean overflows for K*P = " +
                                 std::to_string(map.constant * power_mw));
  }
  return mean;
}

namespace {

void check_q(double q) {
  if (!(q >= 0 && q <= 1)) {
    fail(ErrorCode::Domain, "generating-function argument must lie in [0, 1]");
  }
}

}  // namespace

double pgf_even_complement(const PairDistribution& dist, double q) {
  check_q(q);
  const double x = dist.mean() * (1.0 - q) * (1.0 + q);
  if (dist.kind() == PairKind::Thermal) return x / (1.0 + x);
  return -std::expm1(-x);
}

double pgf_even(const PairDistribution& dist, double q) {
  check_q(q);
  const double x = dist.mean() * (1.0 - q) * (1.0 + q);
  if (dist.kind() == PairKind::Thermal) return 1.0 / (1.0 + x);
  return std::exp(-x);
}

}  // namespace spdcstat
