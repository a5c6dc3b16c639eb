// SPDX-License-Identifier: Apache-2.0
#include "spdcstat/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string_view>

namespace spdcstat {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view text, double& out) {
  text = trim(text);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  return in;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    fields.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

}  // namespace

//---------------------------------------------------------------------------//
// Config

DetectionSetup Config::setup() const {
  return {gate_rate_hz, transmittivity, eta1, eta2, dark1_hz, dark2_hz};
}

void Config::validate() const {
  setup().validate();
  if (!(rep_rate_hz > 0) || !std::isfinite(rep_rate_hz)) {
    fail(ErrorCode::Validation, "rep_rate_hz must be positive and finite");
  }
  if (!(wavelength_nm > 0) || !std::isfinite(wavelength_nm)) {
    fail(ErrorCode::Validation, "wavelength_nm must be positive and finite");
  }
}

Config parse_config(std::istream& in) {
  Config config;
  const std::map<std::string_view, double Config::*> fields = {
      {"gate_rate_hz", &Config::gate_rate_hz},
      {"rep_rate_hz", &Config::rep_rate_hz},
      {"wavelength_nm", &Config::wavelength_nm},
      {"transmittivity", &Config::transmittivity},
      {"eta1", &Config::eta1},
      {"eta2", &Config::eta2},
      {"dark1_hz", &Config::dark1_hz},
      {"dark2_hz", &Config::dark2_hz},
  };
  std::map<std::string_view, std::size_t> seen;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = line;
    text = trim(text.substr(0, text.find('#')));
    if (text.empty()) continue;

    const auto where = "line " + std::to_string(line_no) + ": ";
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorCode::Parse, where + "expected `key = value`");
    }
    const auto key = trim(text.substr(0, eq));
    const auto it = fields.find(key);
    if (it == fields.end()) {
      fail(ErrorCode::Parse, where + "unknown key `" + std::string(key) + "`");
    }
    if (auto prev = seen.find(it->first); prev != seen.end()) {
      fail(ErrorCode::Parse, where + "duplicate key `" + std::string(key) +
                                 "` (first set on line " +
                                 std::to_string(prev->second) + ")");
    }
    seen.emplace(it->first, line_no);
    double value = 0;
    if (!parse_double(text.substr(eq + 1), value) || !std::isfinite(value)) {
      fail(ErrorCode::Parse,
           where + "value of `" + std::string(key) + "` is not a finite number");
    }
    config.*(it->second) = value;
  }
  if (in.bad()) fail(ErrorCode::Io, "error while reading config");
  config.validate();
  return config;
}

Config parse_config(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_config(in);
}

//---------------------------------------------------------------------------//
// Count files

bool Dataset::has_corrected() const noexcept {
  if (records.empty()) return false;
  for (const auto& r : records) {
    if (!r.corrected) return false;
  }
  return true;
}

Dataset read_counts_csv(std::istream& in) {
  const std::string plain = kCountsHeader;
  const std::string extended = plain + "," + kCorrectedColumns;

  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::Parse, "missing CSV header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  bool with_corrected = false;
  if (line == extended) {
    with_corrected = true;
  } else if (line != plain) {
    fail(ErrorCode::Parse, "CSV header must be `" + plain + "` or `" + extended +
                               "`, got `" + line + "`");
  }
  const std::size_t n_fields = with_corrected ? 7 : 4;
  static constexpr const char* kNames[] = {"power_mw", "s1_hz",    "s2_hz",   "c_hz",
                                           "s1_ph_hz", "s2_ph_hz", "c_ph_hz"};

  Dataset data;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    ++row;
    const auto fields = split(line, ',');
    if (fields.size() != n_fields) {
      throw RowError(ErrorCode::Parse, row,
                     "expected " + std::to_string(n_fields) + " fields, got " +
                         std::to_string(fields.size()));
    }
    double v[7] = {};
    for (std::size_t i = 0; i < n_fields; ++i) {
      if (!parse_double(fields[i], v[i])) {
        throw RowError(ErrorCode::Parse, row,
                       std::string(kNames[i]) + " is not a number: `" +
                           std::string(fields[i]) + "`");
      }
      if (!std::isfinite(v[i])) {
        throw RowError(ErrorCode::Validation, row,
                       std::string(kNames[i]) + " is not finite");
      }
      if (i < 4 && v[i] < 0) {
        throw RowError(ErrorCode::Validation, row,
                       std::string(kNames[i]) + " is negative");
      }
    }
    CountRecord rec;
    rec.power_mw = v[0];
    rec.raw = {v[1], v[2], v[3]};
    if (rec.raw.c_hz > std::min(rec.raw.s1_hz, rec.raw.s2_hz)) {
      throw RowError(ErrorCode::Validation, row,
                     "c_hz exceeds min(s1_hz, s2_hz)");
    }
    if (with_corrected) rec.corrected = PhotonRates{v[4], v[5], v[6]};
    if (!data.records.empty() && !(rec.power_mw > data.records.back().power_mw)) {
      throw RowError(ErrorCode::Validation, row,
                     "power_mw must be strictly increasing");
    }
    data.records.push_back(rec);
  }
  if (in.bad()) fail(ErrorCode::Io, "error while reading CSV");
  return data;
}

Dataset read_counts_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_counts_csv(in);
}

void write_counts_csv(std::ostream& out, const Dataset& data) {
  const bool with_corrected = data.has_corrected();
  out << kCountsHeader;
  if (with_corrected) out << ',' << kCorrectedColumns;
  out << '\n';
  for (const auto& r : data.records) {
    out << format_number(r.power_mw) << ',' << format_number(r.raw.s1_hz) << ','
        << format_number(r.raw.s2_hz) << ',' << format_number(r.raw.c_hz);
    if (with_corrected) {
      out << ',' << format_number(r.corrected->s1_hz) << ','
          << format_number(r.corrected->s2_hz) << ','
          << format_number(r.corrected->c_hz);
    }
    out << '\n';
  }
}

void write_counts_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  write_counts_csv(out, data);
  out.flush();
  if (!out) fail(ErrorCode::Io, "error while writing " + path.string());
}

void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& points) {
  out << kCurveHeader << '\n';
  for (const auto& p : points) {
    out << format_number(p.mean_pairs) << ',' << format_number(p.p_single) << ','
        << format_number(p.p_coinc) << '\n';
  }
}

void validate_rates(const Dataset& data, double gate_rate_hz) {
  std::size_t row = 0;
  for (const auto& r : data.records) {
    ++row;
    if (r.raw.s1_hz > gate_rate_hz || r.raw.s2_hz > gate_rate_hz) {
      throw RowError(ErrorCode::Validation, row, "single rate exceeds gate_rate_hz");
    }
  }
}

std::size_t correct_dataset(Dataset& data, const DetectionSetup& setup, bool exact) {
  setup.validate();
  validate_rates(data, setup.gate_rate_hz);
  const double r = setup.gate_rate_hz;
  std::size_t negatives = 0;
  for (auto& rec : data.records) {
    // Same expression as correct_singles, without its negative-signal check.
    const double s1 = (rec.raw.s1_hz - setup.dark1_hz) / (1.0 - setup.dark1_hz / r);
    const double s2 = (rec.raw.s2_hz - setup.dark2_hz) / (1.0 - setup.dark2_hz / r);
    const double c =
        exact ? correct_coincidence_exact(rec.raw.c_hz, s1, s2, setup.dark1_hz,
                                          setup.dark2_hz, r)
              : correct_coincidence(rec.raw.c_hz, s1, s2, setup.dark1_hz,
                                    setup.dark2_hz, r);
    if (s1 < 0 || s2 < 0 || c < 0) ++negatives;
    rec.corrected = PhotonRates{s1, s2, c};
  }
  return negatives;
}

Dataset dataset_from_sweep(const std::vector<SweepPoint>& points) {
  Dataset data;
  data.records.reserve(points.size());
  for (const auto& p : points) {
    CountRecord rec;
    rec.power_mw = p.power_mw;
    rec.raw = p.result.rates;
    data.records.push_back(rec);
  }
  return data;
}

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

std::string format_scientific(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", digits, value);
  std::string s = buf;
  const auto e = s.find('e');
  if (e == std::string::npos) return s;
  std::string mantissa = s.substr(0, e);
  std::string exponent = s.substr(e + 1);
  const bool negative = exponent.front() == '-';
  exponent.erase(0, 1);
  exponent.erase(0, std::min(exponent.find_first_not_of('0'), exponent.size() - 1));
  return mantissa + "e" + (negative ? "-" : "") + exponent;
}

}  // namespace spdcstat
