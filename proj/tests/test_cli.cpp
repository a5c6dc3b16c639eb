// SPDX-License-Identifier: Apache-2.0
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Run {
  int status;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(SPDCSTAT_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf;
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

fs::path scratch() {
  const auto dir = fs::temp_directory_path() / "spdcstat_cli_tests";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string value_of(const std::string& out, const std::string& key) {
  std::istringstream in(out);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(key + "=", 0) == 0) return line.substr(key.size() + 1);
  }
  return {};
}

}  // namespace

TEST_CASE("power") {
  const auto r = run("power --pairs 100 --wavelength-nm 1550 --rep-rate-hz 8e7");
  CHECK(r.status == 0);
  CHECK(r.out == "2.0505e-9\n");
  CHECK(run("power --pairs 100 --wavelength-nm 0 --rep-rate-hz 8e7").status == 3);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run("").status == 2);
  CHECK(run("nonsense").status == 2);
  CHECK(run("curves --model thermal --mean-min 2 --mean-max 1 --points 5").status == 2);
  CHECK(run("curves --model thermal --mean-min 0 --mean-max 1 --points 1").status == 2);
  CHECK(run("curves --model gaussian --mean-min 0 --mean-max 1 --points 5").status == 2);
}

TEST_CASE("curves") {
  const auto r = run("curves --model thermal --mean-min 0 --mean-max 2 --points 3");
  CHECK(r.status == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "mean_pairs,p_single,p_coinc");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3);
  const auto lg = run("curves --model poissonian --mean-min 0.01 --mean-max 100 --points 5 --log");
  CHECK(lg.status == 0);
  CHECK(lg.out.find("\n1,") != std::string::npos);
}

TEST_CASE("config validation errors exit 3") {
  const auto cfg = scratch() / "bad.cfg";
  std::ofstream(cfg) << "transmittivity = 1.5\n";
  CHECK(run("curves --model thermal --mean-min 0 --mean-max 1 --points 3 --config " +
            cfg.string())
            .status == 3);
}

TEST_CASE("simulate is reproducible and does not depend on workers") {
  const auto dir = scratch();
  const std::string common =
      "simulate --model thermal --powers 0.5,1,2 --constant 0.05 --gates 200000 --seed 9 ";
  REQUIRE(run(common + "--workers 1 --out " + (dir / "a.csv").string()).status == 0);
  REQUIRE(run(common + "--workers 4 --out " + (dir / "b.csv").string()).status == 0);
  REQUIRE(run(common + "--out " + (dir / "c.csv").string()).status == 0);
  const auto a = slurp(dir / "a.csv");
  CHECK(a.rfind("power_mw,s1_hz,s2_hz,c_hz\n", 0) == 0);
  CHECK(a == slurp(dir / "b.csv"));
  CHECK(a == slurp(dir / "c.csv"));
  CHECK(run("simulate --model thermal --powers 2,1 --constant 0.05 --gates 10 --seed 1 --out " +
            (dir / "d.csv").string())
            .status == 3);
  CHECK(run("simulate --model thermal --powers 1,x --constant 0.05 --gates 10 --seed 1 --out " +
            (dir / "d.csv").string())
            .status == 2);
}

TEST_CASE("simulate, correct, fit and classify pipeline") {
  const auto dir = scratch();
  const auto cfg = dir / "inst.cfg";
  std::ofstream(cfg) << "eta1 = 0.1\neta2 = 0.1\ndark1_hz = 300\ndark2_hz = 300\n";
  const auto raw = dir / "raw.csv";
  const auto corrected = dir / "corrected.csv";
  REQUIRE(run("simulate --model thermal --config " + cfg.string() +
              " --powers 0.1,0.5,1,2,3,5,7.5,10 --constant 0.05 --gates 300000 --seed 4 --out " +
              raw.string())
              .status == 0);
  const auto raw_before = slurp(raw);
  REQUIRE(run("correct --config " + cfg.string() + " --in " + raw.string() + " --out " +
              corrected.string())
              .status == 0);
  CHECK(slurp(raw) == raw_before);
  CHECK(slurp(corrected).rfind(
            "power_mw,s1_hz,s2_hz,c_hz,s1_ph_hz,s2_ph_hz,c_ph_hz\n", 0) == 0);

  const auto fit = run("fit --model thermal --config " + cfg.string() + " --in " +
                       corrected.string());
  REQUIRE(fit.status == 0);
  CHECK(value_of(fit.out, "model") == "thermal");
  CHECK(value_of(fit.out, "constant_units") == "1/mW");
  CHECK(value_of(fit.out, "points") == "8");
  CHECK(std::stod(value_of(fit.out, "constant")) == doctest::Approx(0.05).epsilon(0.05));

  // raw input is corrected on the fly with the configured darks
  const auto fit_raw = run("fit --model thermal --config " + cfg.string() + " --in " +
                           raw.string());
  REQUIRE(fit_raw.status == 0);
  CHECK(value_of(fit_raw.out, "constant") == value_of(fit.out, "constant"));

  const auto cls = run("classify --config " + cfg.string() + " --in " + corrected.string());
  REQUIRE(cls.status == 0);
  CHECK(!value_of(cls.out, "verdict").empty());
  CHECK(value_of(cls.out, "poissonian_constant_units") == "pairs/mW");
  CHECK(slurp(corrected).size() > 0);
}

TEST_CASE("bad inputs") {
  const auto dir = scratch();
  const auto bad = dir / "bad_row.csv";
  std::ofstream(bad) << "power_mw,s1_hz,s2_hz,c_hz\n1,1000,900,20\n2,1000,900,2000\n";
  CHECK(run("fit --model thermal --in " + bad.string()).status == 3);

  const auto single = dir / "single.csv";
  std::ofstream(single) << "power_mw,s1_hz,s2_hz,c_hz\n1,1000,900,20\n";
  CHECK(run("fit --model thermal --in " + single.string()).status == 3);

  const auto zeros = dir / "zeros.csv";
  std::ofstream(zeros) << "power_mw,s1_hz,s2_hz,c_hz\n1,0,0,0\n2,0,0,0\n3,0,0,0\n";
  CHECK(run("fit --model poissonian --in " + zeros.string()).status == 4);
  CHECK(run("fit --model thermal --in " + (dir / "missing.csv").string()).status == 2);
}
