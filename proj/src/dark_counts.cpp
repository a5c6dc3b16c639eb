// SPDX-License-Identifier: Apache-2.0
#include "spdcstat/dark_counts.hpp"

#include <cmath>
#include <string>

#include "spdcstat/error.hpp"

namespace spdcstat {

namespace {

void check_gate_and_dark(double dark_hz, double gate_rate_hz) {
  if (!(gate_rate_hz > 0) || !std::isfinite(gate_rate_hz)) {
    fail(ErrorCode::Domain, "gate rate must be positive and finite");
  }
  if (!(dark_hz >= 0 && dark_hz < gate_rate_hz)) {
    fail(ErrorCode::Domain, "dark-count rate must lie in [0, gate rate)");
  }
}

void check_probability(double p, const char* what) {
  if (!(p >= 0 && p <= 1)) {
    fail(ErrorCode::Domain, std::string(what) + " per-gate probability " +
                                std::to_string(p) + " outside [0, 1]");
  }
}

}  // namespace

double correct_singles(double s_raw_hz, double dark_hz, double gate_rate_hz) {
  check_gate_and_dark(dark_hz, gate_rate_hz);
  if (s_raw_hz < dark_hz) {
    fail(ErrorCode::NegativeSignal,
         "raw single rate " + std::to_string(s_raw_hz) +
             " Hz is below the dark-count rate " + std::to_string(dark_hz) + " Hz");
  }
  return (s_raw_hz - dark_hz) / (1.0 - dark_hz / gate_rate_hz);
}

double correct_coincidence(double c_raw_hz, double s1_ph_hz, double s2_ph_hz,
                           double dark1_hz, double dark2_hz, double gate_rate_hz) {
  check_gate_and_dark(dark1_hz, gate_rate_hz);
  check_gate_and_dark(dark2_hz, gate_rate_hz);
  const double denom = gate_rate_hz - dark1_hz - dark2_hz;
  if (!(denom > 0)) {
    fail(ErrorCode::Domain, "combined dark-count rate reaches the gate rate");
  }
  return (c_raw_hz * gate_rate_hz - s1_ph_hz * dark2_hz - dark1_hz * s2_ph_hz) / denom;
}

double correct_coincidence_exact(double c_raw_hz, double s1_ph_hz, double s2_ph_hz,
                                 double dark1_hz, double dark2_hz,
                                 double gate_rate_hz) {
  check_gate_and_dark(dark1_hz, gate_rate_hz);
  check_gate_and_dark(dark2_hz, gate_rate_hz);
  const double d1 = dark1_hz / gate_rate_hz;
  const double d2 = dark2_hz / gate_rate_hz;
  const double numer = c_raw_hz - d2 * s1_ph_hz - d1 * s2_ph_hz -
                       d1 * d2 * (gate_rate_hz - s1_ph_hz - s2_ph_hz);
  return numer / ((1.0 - d1) * (1.0 - d2));
}

PhotonRates correct_rates(const RawRates& raw, double dark1_hz, double dark2_hz,
                          double gate_rate_hz, bool exact) {
  PhotonRates ph;
  ph.s1_hz = correct_singles(raw.s1_hz, dark1_hz, gate_rate_hz);
  ph.s2_hz = correct_singles(raw.s2_hz, dark2_hz, gate_rate_hz);
  ph.c_hz = exact ? correct_coincidence_exact(raw.c_hz, ph.s1_hz, ph.s2_hz, dark1_hz,
                                              dark2_hz, gate_rate_hz)
                  : correct_coincidence(raw.c_hz, ph.s1_hz, ph.s2_hz, dark1_hz,
                                        dark2_hz, gate_rate_hz);
  return ph;
}

RawRates apply_dark_forward(const PhotonRates& ph, double dark1_hz, double dark2_hz,
                            double gate_rate_hz) {
  check_gate_and_dark(dark1_hz, gate_rate_hz);
  check_gate_and_dark(dark2_hz, gate_rate_hz);
  const double r = gate_rate_hz;
  const double d1 = dark1_hz / r;
  const double d2 = dark2_hz / r;
  const double p1 = ph.s1_hz / r;
  const double p2 = ph.s2_hz / r;
  const double p12 = ph.c_hz / r;
  check_probability(p1, "detector 1");
  check_probability(p2, "detector 2");
  check_probability(p12, "coincidence");
  constexpr double kSlack = 1e-12;
  if (p12 > p1 + kSlack || p12 > p2 + kSlack || p1 + p2 - p12 > 1 + kSlack) {
    fail(ErrorCode::Domain, "photon rates are not a consistent joint click law");
  }

  RawRates raw;
  raw.s1_hz = r * (p1 + d1 * (1 - p1));
  raw.s2_hz = r * (p2 + d2 * (1 - p2));
  raw.c_hz = r * (p12 + d2 * (p1 - p12) + d1 * (p2 - p12) +
                  d1 * d2 * (1 - p1 - p2 + p12));
  return raw;
}

}  // namespace spdcstat
