// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace spdcstat {

/// Count rates as recorded, photons and dark counts mixed.
struct RawRates {
  double s1_hz = 0;
  double s2_hz = 0;
  double c_hz = 0;

  friend bool operator==(const RawRates&, const RawRates&) = default;
};

/// Count rates attributable to photons alone.
struct PhotonRates {
  double s1_hz = 0;
  double s2_hz = 0;
  double c_hz = 0;
};

/// S_ph = (S_raw - dark) / (1 - dark / R). Exact inverse of the OR of a
/// photon click and an independent per-gate dark Bernoulli.
double correct_singles(double s_raw_hz, double dark_hz, double gate_rate_hz);

/// C_ph ~ (C_raw R - S1_ph d2 - d1 S2_ph) / (R - d1 - d2), dropping all terms
/// in the product d1 d2. Expects singles already corrected. The result may be
/// negative and is returned as such.
double correct_coincidence(double c_raw_hz, double s1_ph_hz, double s2_ph_hz,
                           double dark1_hz, double dark2_hz, double gate_rate_hz);

/// Exact inverse of apply_dark_forward for the coincidence rate, keeping the
/// d1 d2 terms that correct_coincidence drops.
double correct_coincidence_exact(double c_raw_hz, double s1_ph_hz, double s2_ph_hz,
                                 double dark1_hz, double dark2_hz,
                                 double gate_rate_hz);

/// Singles by correct_singles, coincidences by correct_coincidence (or the
/// exact inverse when `exact` is set).
PhotonRates correct_rates(const RawRates& raw, double dark1_hz, double dark2_hz,
                          double gate_rate_hz, bool exact = false);

/// Forward noise model: independent per-gate dark Bernoullis with
/// probability dark_k / R added to photon clicks.
RawRates apply_dark_forward(const PhotonRates& ph, double dark1_hz, double dark2_hz,
                            double gate_rate_hz);

}  // namespace spdcstat
