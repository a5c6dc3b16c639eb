// SPDX-License-Identifier: Apache-2.0
//
// spdcstat: command-line front end over the libspdcstat C interface.
//
// Exit codes: 0 success, 2 usage error, 3 validation error, 4 numeric or
// degenerate-fit error.

#include <cstdio>
#include <cstdlib>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spdcstat/spdcstat.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitNumeric = 4;

int exit_code_for(spdc_status status) {
  switch (status) {
    case SPDC_OK: return kExitOk;
    case SPDC_E_INVALID_ARGUMENT: return kExitUsage;
    case SPDC_E_DEGENERATE_FIT:
    case SPDC_E_NUMERIC:
    case SPDC_E_INTERNAL: return kExitNumeric;
    default: return kExitValidation;
  }
}

// Thrown to unwind out of a subcommand with a given exit code.
struct Exit {
  int code;
};

void check(spdc_status status, const char* context) {
  if (status == SPDC_OK) return;
  std::fprintf(stderr, "spdcstat: %s: %s: %s\n", context, spdc_status_string(status),
               spdc_last_error());
  throw Exit{exit_code_for(status)};
}

[[noreturn]] void usage_error(const std::string& message) {
  std::fprintf(stderr, "spdcstat: %s\n", message.c_str());
  throw Exit{kExitUsage};
}

std::string num(double value) {
  char buf[64];
  check(spdc_format_number(value, buf, sizeof buf), "format");
  return buf;
}

struct ConfigDeleter {
  void operator()(spdc_config* c) const { spdc_config_free(c); }
};
struct DatasetDeleter {
  void operator()(spdc_dataset* d) const { spdc_dataset_free(d); }
};
struct FitDeleter {
  void operator()(spdc_fit* f) const { spdc_fit_free(f); }
};
struct ClassificationDeleter {
  void operator()(spdc_classification* c) const { spdc_classification_free(c); }
};
using ConfigPtr = std::unique_ptr<spdc_config, ConfigDeleter>;
using DatasetPtr = std::unique_ptr<spdc_dataset, DatasetDeleter>;
using FitPtr = std::unique_ptr<spdc_fit, FitDeleter>;
using ClassificationPtr = std::unique_ptr<spdc_classification, ClassificationDeleter>;

ConfigPtr load_config(const std::string& path) {
  spdc_config* raw = nullptr;
  if (path.empty()) {
    check(spdc_config_default(&raw), "config");
  } else {
    check(spdc_config_load(path.c_str(), &raw), path.c_str());
  }
  return ConfigPtr(raw);
}

spdc_setup setup_of(const spdc_config* config) {
  spdc_setup setup{};
  check(spdc_config_setup(config, &setup), "config");
  return setup;
}

DatasetPtr load_dataset(const std::string& path, const spdc_setup& setup) {
  spdc_dataset* raw = nullptr;
  check(spdc_dataset_read_csv(path.c_str(), &raw), path.c_str());
  DatasetPtr data(raw);
  check(spdc_dataset_validate(data.get(), setup.gate_rate_hz), path.c_str());
  return data;
}

bool all_corrected(const spdc_dataset* data) {
  const size_t n = spdc_dataset_size(data);
  for (size_t i = 0; i < n; ++i) {
    spdc_record rec{};
    check(spdc_dataset_record(data, i, &rec), "dataset");
    if (!rec.has_corrected) return false;
  }
  return n > 0;
}

void warn_negatives(size_t negatives) {
  if (negatives > 0) {
    std::fprintf(stderr,
                 "spdcstat: warning: %zu row(s) have negative dark-corrected rates; "
                 "kept unclamped\n",
                 negatives);
  }
}

// Fitting works on photon-induced rates; raw-only files are corrected with the
// configured dark rates first.
void ensure_corrected(spdc_dataset* data, const spdc_setup& setup) {
  if (all_corrected(data)) return;
  size_t negatives = 0;
  check(spdc_dataset_correct(data, &setup, 0, &negatives), "correct");
  warn_negatives(negatives);
}

std::vector<double> parse_powers(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const char* begin = item.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (item.empty() || end == begin || *end != '\0') {
      usage_error("--powers: not a number: `" + item + "`");
    }
    out.push_back(v);
  }
  return out;
}

const std::map<std::string, spdc_model> kModelNames = {
    {"thermal", SPDC_MODEL_THERMAL}, {"poissonian", SPDC_MODEL_POISSONIAN}};

const char* model_name(spdc_model model) {
  return model == SPDC_MODEL_THERMAL ? "thermal" : "poissonian";
}

void print_fit_block(const char* prefix, const spdc_fit* fit) {
  std::printf("%sconstant=%s\n", prefix, num(spdc_fit_constant(fit)).c_str());
  std::printf("%sconstant_units=%s\n", prefix, spdc_fit_constant_units(fit));
  std::printf("%srss=%s\n", prefix, num(spdc_fit_rss(fit)).c_str());
}

void print_mean_table(const spdc_dataset* data, const std::vector<const spdc_fit*>& fits,
                      const std::vector<std::string>& titles) {
  std::printf("\n%12s", "power_mw");
  for (const auto& t : titles) std::printf("  %18s", t.c_str());
  std::printf("\n");
  const size_t n = spdc_dataset_size(data);
  for (size_t i = 0; i < n; ++i) {
    spdc_record rec{};
    check(spdc_dataset_record(data, i, &rec), "dataset");
    std::printf("%12s", num(rec.power_mw).c_str());
    for (const auto* fit : fits) {
      std::printf("  %18s", num(spdc_fit_point_mean(fit, i)).c_str());
    }
    std::printf("\n");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Click statistics of photon pairs seen by two gated threshold detectors"};
  app.require_subcommand(1);

  spdc_model model = SPDC_MODEL_THERMAL;
  std::string config_path;

  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--model", model, "Pair distribution: thermal or poissonian")
        ->required()
        ->transform(CLI::CheckedTransformer(kModelNames, CLI::ignore_case));
  };
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Instrument configuration file")
        ->check(CLI::ExistingFile);
  };

  // curves
  auto* curves = app.add_subcommand("curves", "Single vs coincidence probability curve");
  double mean_min = 0;
  double mean_max = 0;
  std::size_t n_points = 0;
  bool log_spacing = false;
  add_model(curves);
  add_config(curves);
  curves->add_option("--mean-min", mean_min)->required();
  curves->add_option("--mean-max", mean_max)->required();
  curves->add_option("--points", n_points)->required();
  curves->add_flag("--log", log_spacing, "Logarithmic spacing in mean pair number");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo pump-power sweep");
  std::string powers_list;
  double pump_constant = 0;
  std::uint64_t gates = 0;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  std::string out_path;
  add_model(simulate);
  add_config(simulate);
  simulate->add_option("--powers", powers_list, "Comma-separated pump powers in mW")
      ->required();
  simulate->add_option("--constant", pump_constant,
                       "Pump constant: K in 1/mW (thermal) or pairs/mW (poissonian)")
      ->required();
  simulate->add_option("--gates", gates, "Gates per power")->required();
  simulate->add_option("--seed", seed)->required();
  simulate->add_option("--workers", workers, "Worker threads (0 = all cores)");
  simulate->add_option("--out", out_path)->required();

  // correct
  auto* correct = app.add_subcommand("correct", "Dark-count compensation of a count file");
  std::string in_path;
  bool exact = false;
  add_config(correct);
  correct->add_option("--in", in_path)->required()->check(CLI::ExistingFile);
  correct->add_option("--out", out_path)->required();
  correct->add_flag("--exact", exact,
                    "Exact inverse including second-order dark terms (extension)");

  // fit
  auto* fit = app.add_subcommand("fit", "Fit the pump constant of one model");
  add_model(fit);
  add_config(fit);
  fit->add_option("--in", in_path)->required()->check(CLI::ExistingFile);

  // classify
  auto* classify = app.add_subcommand("classify", "Fit both models and classify");
  double thermal_at_most = 1.0 / 3.0;
  double poissonian_at_least = 3.0;
  add_config(classify);
  classify->add_option("--in", in_path)->required()->check(CLI::ExistingFile);
  classify->add_option("--thermal-at-most", thermal_at_most,
                       "rss ratio at or below which the verdict is thermal");
  classify->add_option("--poissonian-at-least", poissonian_at_least,
                       "rss ratio at or above which the verdict is poissonian");

  // power
  auto* power = app.add_subcommand("power", "Optical power of a pair flux");
  double pairs = 0;
  double wavelength_nm = 0;
  double rep_rate_hz = 0;
  power->add_option("--pairs", pairs)->required();
  power->add_option("--wavelength-nm", wavelength_nm)->required();
  power->add_option("--rep-rate-hz", rep_rate_hz)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (curves->parsed()) {
      if (!(mean_min < mean_max)) usage_error("--mean-min must be below --mean-max");
      if (n_points < 2) usage_error("--points must be at least 2");
      auto config = load_config(config_path);
      const auto setup = setup_of(config.get());
      std::vector<spdc_curve_point> points(n_points);
      check(spdc_curve(model, &setup, mean_min, mean_max, n_points, log_spacing ? 1 : 0,
                       points.data()),
            "curves");
      std::string text = "mean_pairs,p_single,p_coinc\n";
      for (const auto& p : points) {
        text += num(p.mean_pairs) + "," + num(p.p_single) + "," + num(p.p_coinc) + "\n";
      }
      std::fputs(text.c_str(), stdout);
    } else if (simulate->parsed()) {
      const auto powers = parse_powers(powers_list);
      auto config = load_config(config_path);
      const auto setup = setup_of(config.get());
      spdc_dataset* raw = nullptr;
      check(spdc_simulate_sweep(model, pump_constant, powers.data(), powers.size(), &setup,
                                gates, seed, workers, &raw),
            "simulate");
      DatasetPtr data(raw);
      check(spdc_dataset_write_csv(data.get(), out_path.c_str()), out_path.c_str());
    } else if (correct->parsed()) {
      auto config = load_config(config_path);
      const auto setup = setup_of(config.get());
      auto data = load_dataset(in_path, setup);
      size_t negatives = 0;
      check(spdc_dataset_correct(data.get(), &setup, exact ? 1 : 0, &negatives),
            "correct");
      warn_negatives(negatives);
      check(spdc_dataset_write_csv(data.get(), out_path.c_str()), out_path.c_str());
    } else if (fit->parsed()) {
      auto config = load_config(config_path);
      const auto setup = setup_of(config.get());
      auto data = load_dataset(in_path, setup);
      ensure_corrected(data.get(), setup);
      spdc_fit* raw = nullptr;
      check(spdc_fit_pump_constant(data.get(), model, &setup, &raw), "fit");
      FitPtr result(raw);
      std::printf("model=%s\n", model_name(model));
      print_fit_block("", result.get());
      std::printf("points=%zu\n", spdc_fit_num_points(result.get()));
      print_mean_table(data.get(), {result.get()}, {"mean_pairs"});
    } else if (classify->parsed()) {
      auto config = load_config(config_path);
      const auto setup = setup_of(config.get());
      auto data = load_dataset(in_path, setup);
      ensure_corrected(data.get(), setup);
      spdc_classification* raw = nullptr;
      check(spdc_classify(data.get(), &setup, thermal_at_most, poissonian_at_least, &raw),
            "classify");
      ClassificationPtr result(raw);
      const auto* th = spdc_classification_fit(result.get(), SPDC_MODEL_THERMAL);
      const auto* po = spdc_classification_fit(result.get(), SPDC_MODEL_POISSONIAN);
      static const char* kVerdicts[] = {"thermal", "poissonian", "intermediate"};
      std::printf("verdict=%s\n", kVerdicts[spdc_classification_verdict(result.get())]);
      std::printf("verdict_ratio=%s\n", num(spdc_classification_ratio(result.get())).c_str());
      print_fit_block("thermal_", th);
      print_fit_block("poissonian_", po);
      std::printf("points=%zu\n", spdc_dataset_size(data.get()));
      print_mean_table(data.get(), {th, po}, {"thermal_mean", "poissonian_mean"});
    } else if (power->parsed()) {
      double watts = 0;
      check(spdc_pairs_to_power(pairs, wavelength_nm, rep_rate_hz, &watts), "power");
      char buf[64];
      check(spdc_format_scientific(watts, 4, buf, sizeof buf), "format");
      std::printf("%s\n", buf);
    }
  } catch (const Exit& e) {
    return e.code;
  }
  return kExitOk;
}
