// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "spdcstat/click_model.hpp"
#include "spdcstat/estimation.hpp"
#include "spdcstat/mc_simulator.hpp"

namespace spdcstat {

/// Instrument configuration read from a `key = value` file.
struct Config {
  double gate_rate_hz = 316000.0;
  double rep_rate_hz = 8.0e7;
  double wavelength_nm = 1550.0;
  double transmittivity = 1.0;
  double eta1 = 0.02;
  double eta2 = 0.02;
  double dark1_hz = 0.0;
  double dark2_hz = 0.0;

  DetectionSetup setup() const;
  void validate() const;
};

/// Parses `key = value` lines. `#` starts a comment; blank lines are ignored;
/// keys absent from the file keep their defaults.
Config parse_config(std::istream& in);
Config parse_config(const std::filesystem::path& path);

/// Error tied to one data row of a CSV file (1-based, header excluded).
class RowError : public Error {
 public:
  RowError(ErrorCode code, std::size_t row, const std::string& what)
      : Error(code, "row " + std::to_string(row) + ": " + what), row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

/// Records ordered by strictly increasing pump power.
struct Dataset {
  std::vector<CountRecord> records;

  /// True when every record carries photon-induced rates.
  bool has_corrected() const noexcept;
};

inline constexpr const char* kCountsHeader = "power_mw,s1_hz,s2_hz,c_hz";
inline constexpr const char* kCorrectedColumns = "s1_ph_hz,s2_ph_hz,c_ph_hz";
inline constexpr const char* kCurveHeader = "mean_pairs,p_single,p_coinc";

/// Reads the raw-count schema or the raw-plus-corrected schema written by
/// write_counts_csv.
Dataset read_counts_csv(std::istream& in);
Dataset read_counts_csv(const std::filesystem::path& path);

void write_counts_csv(std::ostream& out, const Dataset& data);
void write_counts_csv(const std::filesystem::path& path, const Dataset& data);

void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& points);

/// Checks raw rates against the gate rate.
void validate_rates(const Dataset& data, double gate_rate_hz);

/// Fills `corrected` on every record. Rows whose raw singles fall below the
/// dark rate, or whose corrected coincidences come out negative, keep the
/// negative value and are counted in the return value.
std::size_t correct_dataset(Dataset& data, const DetectionSetup& setup,
                            bool exact = false);

/// Builds a raw-count dataset from a simulated sweep.
Dataset dataset_from_sweep(const std::vector<SweepPoint>& points);

/// 12 significant digits, shortest of fixed/scientific ("%.12g").
std::string format_number(double value);

/// Mantissa with `digits` decimals and an unpadded exponent, e.g. 2.0505e-9.
std::string format_scientific(double value, int digits = 4);

}  // namespace spdcstat
