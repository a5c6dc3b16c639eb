// SPDX-License-Identifier: Apache-2.0
#include "spdcstat/spdcstat.h"

#include <cstring>
#include <exception>
#include <limits>
#include <new>
#include <string>
#include <vector>

#include "spdcstat/click_model.hpp"
#include "spdcstat/dark_counts.hpp"
#include "spdcstat/estimation.hpp"
#include "spdcstat/io.hpp"
#include "spdcstat/mc_simulator.hpp"
#include "spdcstat/pair_distributions.hpp"

struct spdc_config {
  spdcstat::Config value;
};

struct spdc_dataset {
  spdcstat::Dataset value;
};

struct spdc_fit {
  spdcstat::FitResult value;
};

struct spdc_classification {
  spdcstat::Classification value;
  spdc_fit thermal;
  spdc_fit poissonian;
};

namespace {

thread_local std::string g_last_error;

spdc_status map_code(spdcstat::ErrorCode code) {
  using spdcstat::ErrorCode;
  switch (code) {
    case ErrorCode::Domain: return SPDC_E_DOMAIN;
    case ErrorCode::Range: return SPDC_E_RANGE;
    case ErrorCode::NegativeSignal: return SPDC_E_NEGATIVE_SIGNAL;
    case ErrorCode::Parse: return SPDC_E_PARSE;
    case ErrorCode::Validation: return SPDC_E_VALIDATION;
    case ErrorCode::Io: return SPDC_E_IO;
    case ErrorCode::Input: return SPDC_E_INPUT;
    case ErrorCode::DegenerateFit: return SPDC_E_DEGENERATE_FIT;
    case ErrorCode::Numeric: return SPDC_E_NUMERIC;
  }
  return SPDC_E_INTERNAL;
}

spdc_status set_error(spdc_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs body, translating exceptions into status codes.
template <class F>
spdc_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return SPDC_OK;
  } catch (const spdcstat::Error& e) {
    return set_error(map_code(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(SPDC_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(SPDC_E_INTERNAL, e.what());
  } catch (...) {
    return set_error(SPDC_E_INTERNAL, "unknown exception");
  }
}

spdc_status null_argument(const char* name) {
  return set_error(SPDC_E_INVALID_ARGUMENT, std::string(name) + " is null");
}

#define SPDC_REQUIRE(ptr) \
  do {                    \
    if (!(ptr)) return null_argument(#ptr); \
  } while (0)

bool to_kind(spdc_model model, spdcstat::PairKind& kind) {
  switch (model) {
    case SPDC_MODEL_THERMAL: kind = spdcstat::PairKind::Thermal; return true;
    case SPDC_MODEL_POISSONIAN: kind = spdcstat::PairKind::Poissonian; return true;
  }
  return false;
}

#define SPDC_KIND(model, kind)                                                  \
  spdcstat::PairKind kind{};                                                    \
  if (!to_kind(model, kind)) {                                                  \
    return set_error(SPDC_E_INVALID_ARGUMENT, "unknown model enumerator");      \
  }

spdc_model from_kind(spdcstat::PairKind kind) {
  return kind == spdcstat::PairKind::Thermal ? SPDC_MODEL_THERMAL : SPDC_MODEL_POISSONIAN;
}

spdcstat::DetectionSetup to_setup(const spdc_setup& s) {
  return {s.gate_rate_hz, s.transmittivity, s.eta1, s.eta2, s.dark1_hz, s.dark2_hz};
}

spdc_status copy_string(const std::string& text, char* buf, size_t buf_size) {
  if (text.size() + 1 > buf_size) {
    return set_error(SPDC_E_RANGE, "output buffer too small");
  }
  std::memcpy(buf, text.c_str(), text.size() + 1);
  return SPDC_OK;
}

}  // namespace

extern "C" {

const char* spdc_version(void) { return "1.0.0"; }

const char* spdc_status_string(spdc_status status) {
  switch (status) {
    case SPDC_OK: return "ok";
    case SPDC_E_INVALID_ARGUMENT: return "invalid argument";
    case SPDC_E_DOMAIN: return "domain error";
    case SPDC_E_RANGE: return "range error";
    case SPDC_E_NEGATIVE_SIGNAL: return "negative signal";
    case SPDC_E_PARSE: return "parse error";
    case SPDC_E_VALIDATION: return "validation error";
    case SPDC_E_IO: return "i/o error";
    case SPDC_E_INPUT: return "input error";
    case SPDC_E_DEGENERATE_FIT: return "degenerate fit";
    case SPDC_E_NUMERIC: return "numeric error";
    case SPDC_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* spdc_last_error(void) { return g_last_error.c_str(); }

spdc_status spdc_pmf(spdc_model model, double mean, uint64_t m, double* out) {
  SPDC_REQUIRE(out);
  SPDC_KIND(model, kind);
  return guarded([&] { *out = spdcstat::pmf(spdcstat::PairDistribution(kind, mean), m); });
}

spdc_status spdc_mean_from_pump(spdc_model model, double constant, double power_mw,
                                double* out) {
  SPDC_REQUIRE(out);
  SPDC_KIND(model, kind);
  return guarded([&] { *out = spdcstat::mean_from_pump({kind, constant}, power_mw); });
}

spdc_status spdc_pgf_even(spdc_model model, double mean, double q, double* out) {
  SPDC_REQUIRE(out);
  SPDC_KIND(model, kind);
  return guarded(
      [&] { *out = spdcstat::pgf_even(spdcstat::PairDistribution(kind, mean), q); });
}

spdc_status spdc_click_probabilities_eval(spdc_model model, double mean,
                                          const spdc_setup* setup,
                                          spdc_click_probabilities* out) {
  SPDC_REQUIRE(setup);
  SPDC_REQUIRE(out);
  SPDC_KIND(model, kind);
  return guarded([&] {
    const auto p = spdcstat::click_probabilities(spdcstat::PairDistribution(kind, mean),
                                                 to_setup(*setup));
    *out = {p.p_s1, p.p_s2, p.p_coinc, p.p_single};
  });
}

spdc_status spdc_correct_singles(double s_raw_hz, double dark_hz, double gate_rate_hz,
                                 double* out) {
  SPDC_REQUIRE(out);
  return guarded([&] { *out = spdcstat::correct_singles(s_raw_hz, dark_hz, gate_rate_hz); });
}

spdc_status spdc_correct_coincidence(double c_raw_hz, double s1_ph_hz, double s2_ph_hz,
                                     double dark1_hz, double dark2_hz,
                                     double gate_rate_hz, double* out) {
  SPDC_REQUIRE(out);
  return guarded([&] {
    *out = spdcstat::correct_coincidence(c_raw_hz, s1_ph_hz, s2_ph_hz, dark1_hz, dark2_hz,
                                         gate_rate_hz);
  });
}

spdc_status spdc_config_default(spdc_config** out) {
  SPDC_REQUIRE(out);
  return guarded([&] { *out = new spdc_config{}; });
}

spdc_status spdc_config_load(const char* path, spdc_config** out) {
  SPDC_REQUIRE(path);
  SPDC_REQUIRE(out);
  return guarded([&] { *out = new spdc_config{spdcstat::parse_config(path)}; });
}

void spdc_config_free(spdc_config* config) { delete config; }

spdc_status spdc_config_setup(const spdc_config* config, spdc_setup* out) {
  SPDC_REQUIRE(config);
  SPDC_REQUIRE(out);
  const auto s = config->value.setup();
  *out = {s.gate_rate_hz, s.transmittivity, s.eta1, s.eta2, s.dark1_hz, s.dark2_hz};
  return SPDC_OK;
}

spdc_status spdc_config_rep_rate_hz(const spdc_config* config, double* out) {
  SPDC_REQUIRE(config);
  SPDC_REQUIRE(out);
  *out = config->value.rep_rate_hz;
  return SPDC_OK;
}

spdc_status spdc_config_wavelength_nm(const spdc_config* config, double* out) {
  SPDC_REQUIRE(config);
  SPDC_REQUIRE(out);
  *out = config->value.wavelength_nm;
  return SPDC_OK;
}

spdc_status spdc_dataset_read_csv(const char* path, spdc_dataset** out) {
  SPDC_REQUIRE(path);
  SPDC_REQUIRE(out);
  return guarded([&] { *out = new spdc_dataset{spdcstat::read_counts_csv(path)}; });
}

spdc_status spdc_dataset_write_csv(const spdc_dataset* data, const char* path) {
  SPDC_REQUIRE(data);
  SPDC_REQUIRE(path);
  return guarded([&] { spdcstat::write_counts_csv(path, data->value); });
}

void spdc_dataset_free(spdc_dataset* data) { delete data; }

size_t spdc_dataset_size(const spdc_dataset* data) {
  return data ? data->value.records.size() : 0;
}

spdc_status spdc_dataset_record(const spdc_dataset* data, size_t index, spdc_record* out) {
  SPDC_REQUIRE(data);
  SPDC_REQUIRE(out);
  if (index >= data->value.records.size()) {
    return set_error(SPDC_E_INVALID_ARGUMENT, "record index out of bounds");
  }
  const auto& r = data->value.records[index];
  *out = {r.power_mw, r.raw.s1_hz, r.raw.s2_hz, r.raw.c_hz, r.corrected ? 1 : 0,
          r.corrected ? r.corrected->s1_hz : 0.0, r.corrected ? r.corrected->s2_hz : 0.0,
          r.corrected ? r.corrected->c_hz : 0.0};
  return SPDC_OK;
}

spdc_status spdc_dataset_validate(const spdc_dataset* data, double gate_rate_hz) {
  SPDC_REQUIRE(data);
  return guarded([&] { spdcstat::validate_rates(data->value, gate_rate_hz); });
}

spdc_status spdc_dataset_correct(spdc_dataset* data, const spdc_setup* setup, int exact,
                                 size_t* n_negative) {
  SPDC_REQUIRE(data);
  SPDC_REQUIRE(setup);
  return guarded([&] {
    // Correct a copy so a failure leaves the dataset untouched.
    auto copy = data->value;
    const auto negatives = spdcstat::correct_dataset(copy, to_setup(*setup), exact != 0);
    data->value = std::move(copy);
    if (n_negative) *n_negative = negatives;
  });
}

spdc_status spdc_simulate(spdc_model model, double mean, const spdc_setup* setup,
                          uint64_t n_gates, uint64_t seed, unsigned workers,
                          spdc_sim_counts* out) {
  SPDC_REQUIRE(setup);
  SPDC_REQUIRE(out);
  SPDC_KIND(model, kind);
  return guarded([&] {
    spdcstat::SimConfig config{n_gates, seed, spdcstat::PairDistribution(kind, mean),
                               to_setup(*setup), workers};
    const auto r = spdcstat::simulate(config);
    *out = {r.n_gates, r.n_s1, r.n_s2, r.n_coinc};
  });
}

spdc_status spdc_simulate_sweep(spdc_model model, double pump_constant,
                                const double* powers_mw, size_t n_powers,
                                const spdc_setup* setup, uint64_t n_gates_per_point,
                                uint64_t seed, unsigned workers, spdc_dataset** out) {
  if (n_powers > 0) SPDC_REQUIRE(powers_mw);
  SPDC_REQUIRE(setup);
  SPDC_REQUIRE(out);
  SPDC_KIND(model, kind);
  return guarded([&] {
    const std::span<const double> powers(powers_mw, n_powers);
    for (size_t i = 1; i < n_powers; ++i) {
      if (!(powers[i] > powers[i - 1])) {
        spdcstat::fail(spdcstat::ErrorCode::Validation,
                       "pump powers must be strictly increasing");
      }
    }
    const auto points = spdcstat::sweep(powers, {kind, pump_constant}, to_setup(*setup),
                                        n_gates_per_point, seed, workers);
    *out = new spdc_dataset{spdcstat::dataset_from_sweep(points)};
  });
}

spdc_status spdc_invert_mean(double p_single_target, spdc_model model,
                             const spdc_setup* setup, double* out) {
  SPDC_REQUIRE(setup);
  SPDC_REQUIRE(out);
  SPDC_KIND(model, kind);
  return guarded(
      [&] { *out = spdcstat::invert_mean(p_single_target, kind, to_setup(*setup)); });
}

spdc_status spdc_curve(spdc_model model, const spdc_setup* setup, double mean_min,
                       double mean_max, size_t n_points, int log_spacing,
                       spdc_curve_point* out) {
  SPDC_REQUIRE(setup);
  SPDC_REQUIRE(out);
  SPDC_KIND(model, kind);
  return guarded([&] {
    const auto points =
        spdcstat::curve(kind, to_setup(*setup), mean_min, mean_max, n_points,
                        log_spacing ? spdcstat::Spacing::Log : spdcstat::Spacing::Linear);
    for (size_t i = 0; i < points.size(); ++i) {
      out[i] = {points[i].mean_pairs, points[i].p_single, points[i].p_coinc};
    }
  });
}

spdc_status spdc_fit_pump_constant(const spdc_dataset* data, spdc_model model,
                                   const spdc_setup* setup, spdc_fit** out) {
  SPDC_REQUIRE(data);
  SPDC_REQUIRE(setup);
  SPDC_REQUIRE(out);
  SPDC_KIND(model, kind);
  return guarded([&] {
    *out = new spdc_fit{
        spdcstat::fit_pump_constant(data->value.records, kind, to_setup(*setup))};
  });
}

void spdc_fit_free(spdc_fit* fit) { delete fit; }

spdc_model spdc_fit_model(const spdc_fit* fit) {
  return fit ? from_kind(fit->value.model_kind) : SPDC_MODEL_THERMAL;
}

double spdc_fit_constant(const spdc_fit* fit) { return fit ? fit->value.pump_constant : 0; }

const char* spdc_fit_constant_units(const spdc_fit* fit) {
  return fit ? fit->value.constant_units() : "";
}

double spdc_fit_rss(const spdc_fit* fit) { return fit ? fit->value.rss : 0; }

size_t spdc_fit_num_points(const spdc_fit* fit) {
  return fit ? fit->value.per_point_means.size() : 0;
}

double spdc_fit_point_mean(const spdc_fit* fit, size_t index) {
  if (!fit || index >= fit->value.per_point_means.size()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return fit->value.per_point_means[index];
}

spdc_status spdc_classify(const spdc_dataset* data, const spdc_setup* setup,
                          double thermal_at_most, double poissonian_at_least,
                          spdc_classification** out) {
  SPDC_REQUIRE(data);
  SPDC_REQUIRE(setup);
  SPDC_REQUIRE(out);
  return guarded([&] {
    auto c = spdcstat::classify(data->value.records, to_setup(*setup),
                                {thermal_at_most, poissonian_at_least});
    auto* result = new spdc_classification{c, {c.thermal}, {c.poissonian}};
    *out = result;
  });
}

void spdc_classification_free(spdc_classification* result) { delete result; }

spdc_verdict spdc_classification_verdict(const spdc_classification* result) {
  if (!result) return SPDC_VERDICT_INTERMEDIATE;
  switch (result->value.verdict) {
    case spdcstat::Verdict::Thermal: return SPDC_VERDICT_THERMAL;
    case spdcstat::Verdict::Poissonian: return SPDC_VERDICT_POISSONIAN;
    case spdcstat::Verdict::Intermediate: break;
  }
  return SPDC_VERDICT_INTERMEDIATE;
}

double spdc_classification_ratio(const spdc_classification* result) {
  return result ? result->value.ratio : 0;
}

const spdc_fit* spdc_classification_fit(const spdc_classification* result,
                                        spdc_model model) {
  if (!result) return nullptr;
  if (model == SPDC_MODEL_THERMAL) return &result->thermal;
  if (model == SPDC_MODEL_POISSONIAN) return &result->poissonian;
  return nullptr;
}

spdc_status spdc_pairs_to_power(double mean_pairs_per_pulse, double wavelength_nm,
                                double rep_rate_hz, double* watts) {
  SPDC_REQUIRE(watts);
  return guarded([&] {
    *watts = spdcstat::pairs_to_power(mean_pairs_per_pulse, wavelength_nm, rep_rate_hz);
  });
}

spdc_status spdc_format_number(double value, char* buf, size_t buf_size) {
  SPDC_REQUIRE(buf);
  return copy_string(spdcstat::format_number(value), buf, buf_size);
}

spdc_status spdc_format_scientific(double value, int digits, char* buf, size_t buf_size) {
  SPDC_REQUIRE(buf);
  if (digits < 0 || digits > 17) {
    return set_error(SPDC_E_INVALID_ARGUMENT, "digits must lie in [0, 17]");
  }
  return copy_string(spdcstat::format_scientific(value, digits), buf, buf_size);
}

}  // extern "C"
