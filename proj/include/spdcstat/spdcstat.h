/* SPDX-License-Identifier: Apache-2.0 */
/*
 * C interface to libspdcstat: photon-pair click statistics for two gated
 * threshold detectors behind a 50/50 coupler.
 *
 * Every fallible call returns an spdc_status. On failure the thread-local
 * message from spdc_last_error() describes what went wrong; output
 * parameters are left untouched. Handles are opaque and must be released
 * with the matching *_free function. Handles may be shared between threads
 * for reading; mutating calls need external synchronisation.
 */
#ifndef SPDCSTAT_SPDCSTAT_H
#define SPDCSTAT_SPDCSTAT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SPDCSTAT_BUILDING)
#    define SPDC_API __declspec(dllexport)
#  else
#    define SPDC_API __declspec(dllimport)
#  endif
#else
#  define SPDC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum spdc_status {
  SPDC_OK = 0,
  SPDC_E_INVALID_ARGUMENT = 1, /* null pointer, bad enum, index out of bounds */
  SPDC_E_DOMAIN = 2,
  SPDC_E_RANGE = 3,
  SPDC_E_NEGATIVE_SIGNAL = 4,
  SPDC_E_PARSE = 5,
  SPDC_E_VALIDATION = 6,
  SPDC_E_IO = 7,
  SPDC_E_INPUT = 8,
  SPDC_E_DEGENERATE_FIT = 9,
  SPDC_E_NUMERIC = 10,
  SPDC_E_INTERNAL = 11
} spdc_status;

typedef enum spdc_model {
  SPDC_MODEL_THERMAL = 0,
  SPDC_MODEL_POISSONIAN = 1
} spdc_model;

typedef enum spdc_verdict {
  SPDC_VERDICT_THERMAL = 0,
  SPDC_VERDICT_POISSONIAN = 1,
  SPDC_VERDICT_INTERMEDIATE = 2
} spdc_verdict;

typedef struct spdc_setup {
  double gate_rate_hz;
  double transmittivity;
  double eta1;
  double eta2;
  double dark1_hz;
  double dark2_hz;
} spdc_setup;

typedef struct spdc_click_probabilities {
  double p_s1;
  double p_s2;
  double p_coinc;
  double p_single;
} spdc_click_probabilities;

typedef struct spdc_curve_point {
  double mean_pairs;
  double p_single;
  double p_coinc;
} spdc_curve_point;

typedef struct spdc_record {
  double power_mw;
  double s1_hz;
  double s2_hz;
  double c_hz;
  int has_corrected;
  double s1_ph_hz;
  double s2_ph_hz;
  double c_ph_hz;
} spdc_record;

typedef struct spdc_sim_counts {
  uint64_t n_gates;
  uint64_t n_s1;
  uint64_t n_s2;
  uint64_t n_coinc;
} spdc_sim_counts;

typedef struct spdc_config spdc_config;
typedef struct spdc_dataset spdc_dataset;
typedef struct spdc_fit spdc_fit;
typedef struct spdc_classification spdc_classification;

SPDC_API const char* spdc_version(void);
SPDC_API const char* spdc_status_string(spdc_status status);
/* Message of the last failed call on this thread; empty after success. */
SPDC_API const char* spdc_last_error(void);

/* Pair distributions */
SPDC_API spdc_status spdc_pmf(spdc_model model, double mean, uint64_t m, double* out);
SPDC_API spdc_status spdc_mean_from_pump(spdc_model model, double constant,
                                         double power_mw, double* out);
SPDC_API spdc_status spdc_pgf_even(spdc_model model, double mean, double q, double* out);

/* Click model */
SPDC_API spdc_status spdc_click_probabilities_eval(spdc_model model, double mean,
                                                   const spdc_setup* setup,
                                                   spdc_click_probabilities* out);

/* Dark-count compensation */
SPDC_API spdc_status spdc_correct_singles(double s_raw_hz, double dark_hz,
                                          double gate_rate_hz, double* out);
SPDC_API spdc_status spdc_correct_coincidence(double c_raw_hz, double s1_ph_hz,
                                              double s2_ph_hz, double dark1_hz,
                                              double dark2_hz, double gate_rate_hz,
                                              double* out);

/* Configuration */
SPDC_API spdc_status spdc_config_default(spdc_config** out);
SPDC_API spdc_status spdc_config_load(const char* path, spdc_config** out);
SPDC_API void spdc_config_free(spdc_config* config);
SPDC_API spdc_status spdc_config_setup(const spdc_config* config, spdc_setup* out);
SPDC_API spdc_status spdc_config_rep_rate_hz(const spdc_config* config, double* out);
SPDC_API spdc_status spdc_config_wavelength_nm(const spdc_config* config, double* out);

/* Count datasets */
SPDC_API spdc_status spdc_dataset_read_csv(const char* path, spdc_dataset** out);
SPDC_API spdc_status spdc_dataset_write_csv(const spdc_dataset* data, const char* path);
SPDC_API void spdc_dataset_free(spdc_dataset* data);
SPDC_API size_t spdc_dataset_size(const spdc_dataset* data);
SPDC_API spdc_status spdc_dataset_record(const spdc_dataset* data, size_t index,
                                         spdc_record* out);
/* Checks raw rates against the gate rate. */
SPDC_API spdc_status spdc_dataset_validate(const spdc_dataset* data, double gate_rate_hz);
/* Fills photon-induced rates. exact != 0 keeps the second-order dark terms.
 * *n_negative receives the number of rows with a negative corrected rate. */
SPDC_API spdc_status spdc_dataset_correct(spdc_dataset* data, const spdc_setup* setup,
                                          int exact, size_t* n_negative);

/* Monte Carlo */
SPDC_API spdc_status spdc_simulate(spdc_model model, double mean, const spdc_setup* setup,
                                   uint64_t n_gates, uint64_t seed, unsigned workers,
                                   spdc_sim_counts* out);
/* powers must be strictly increasing. */
SPDC_API spdc_status spdc_simulate_sweep(spdc_model model, double pump_constant,
                                         const double* powers_mw, size_t n_powers,
                                         const spdc_setup* setup,
                                         uint64_t n_gates_per_point, uint64_t seed,
                                         unsigned workers, spdc_dataset** out);

/* Estimation */
SPDC_API spdc_status spdc_invert_mean(double p_single_target, spdc_model model,
                                      const spdc_setup* setup, double* out);
/* Writes n_points entries to out. */
SPDC_API spdc_status spdc_curve(spdc_model model, const spdc_setup* setup,
                                double mean_min, double mean_max, size_t n_points,
                                int log_spacing, spdc_curve_point* out);
SPDC_API spdc_status spdc_fit_pump_constant(const spdc_dataset* data, spdc_model model,
                                            const spdc_setup* setup, spdc_fit** out);
SPDC_API void spdc_fit_free(spdc_fit* fit);
SPDC_API spdc_model spdc_fit_model(const spdc_fit* fit);
SPDC_API double spdc_fit_constant(const spdc_fit* fit);
SPDC_API const char* spdc_fit_constant_units(const spdc_fit* fit);
SPDC_API double spdc_fit_rss(const spdc_fit* fit);
SPDC_API size_t spdc_fit_num_points(const spdc_fit* fit);
/* NaN for a null handle or an index past the end. */
SPDC_API double spdc_fit_point_mean(const spdc_fit* fit, size_t index);

SPDC_API spdc_status spdc_classify(const spdc_dataset* data, const spdc_setup* setup,
                                   double thermal_at_most, double poissonian_at_least,
                                   spdc_classification** out);
SPDC_API void spdc_classification_free(spdc_classification* result);
SPDC_API spdc_verdict spdc_classification_verdict(const spdc_classification* result);
SPDC_API double spdc_classification_ratio(const spdc_classification* result);
/* Borrowed view of one of the two fits; valid while result lives. */
SPDC_API const spdc_fit* spdc_classification_fit(const spdc_classification* result,
                                                 spdc_model model);

SPDC_API spdc_status spdc_pairs_to_power(double mean_pairs_per_pulse, double wavelength_nm,
                                         double rep_rate_hz, double* watts);

/* Number formatting shared by all emitted files: "%.12g". buf_size >= 32. */
SPDC_API spdc_status spdc_format_number(double value, char* buf, size_t buf_size);
/* Scientific notation with `digits` decimals and an unpadded exponent. */
SPDC_API spdc_status spdc_format_scientific(double value, int digits, char* buf,
                                            size_t buf_size);

#ifdef __cplusplus
}
#endif

#endif /* SPDCSTAT_SPDCSTAT_H */
