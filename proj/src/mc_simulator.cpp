// SPDX-License-Identifier: Apache-2.0
#include "spdcstat/mc_simulator.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "spdcstat/counter_rng.hpp"

namespace spdcstat {

namespace {

struct Tally {
  std::uint64_t s1 = 0;
  std::uint64_t s2 = 0;
  std::uint64_t coinc = 0;
};

// Uniform on [0, 1): compare u < p for a Bernoulli(p) draw.
inline double uniform01(CounterRng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void run_gates(const SimConfig& config, std::uint64_t first, std::uint64_t last,
               Tally& tally) {
  const auto& setup = config.setup;
  const double dark_p1 = setup.dark1_hz / setup.gate_rate_hz;
  const double dark_p2 = setup.dark2_hz / setup.gate_rate_hz;
  const double t = setup.transmittivity;

  for (std::uint64_t gate = first; gate < last; ++gate) {
    CounterRng rng(config.seed, gate);
    bool click1 = uniform01(rng) < dark_p1;
    bool click2 = uniform01(rng) < dark_p2;

    const std::uint64_t pairs = sample(config.dist, rng);
    if (pairs > kMaxPairsPerGate) {
      fail(ErrorCode::Range, "gate " + std::to_string(gate) + " drew " +
                                 std::to_string(pairs) + " pairs, above the cap of " +
                                 std::to_string(kMaxPairsPerGate));
    }
    for (std::uint64_t photon = 0; photon < 2 * pairs && !(click1 && click2);
         ++photon) {
      if (!(uniform01(rng) < t)) continue;
      const bool arm1 = uniform01(rng) < 0.5;
      const double eta = arm1 ? setup.eta1 : setup.eta2;
      if (uniform01(rng) < eta) (arm1 ? click1 : click2) = true;
    }
    tally.s1 += click1;
    tally.s2 += click2;
    tally.coinc += click1 && click2;
  }
}

}  // namespace

void SimConfig::validate() const {
  if (n_gates < 1) fail(ErrorCode::Validation, "n_gates must be at least 1");
  setup.validate();
}

SimResult simulate(const SimConfig& config) {
  config.validate();

  unsigned workers = config.workers != 0 ? config.workers
                                         : std::max(1u, std::thread::hardware_concurrency());
  // Small jobs are not worth a thread each.
  constexpr std::uint64_t kMinGatesPerWorker = 4096;
  workers = static_cast<unsigned>(std::clamp<std::uint64_t>(
      config.n_gates / kMinGatesPerWorker, 1, workers));

  std::vector<Tally> tallies(workers);
  if (workers == 1) {
    run_gates(config, 0, config.n_gates, tallies[0]);
  } else {
    std::exception_ptr error;
    std::mutex error_mutex;
    {
      std::vector<std::jthread> threads;
      threads.reserve(workers);
      const std::uint64_t chunk = config.n_gates / workers;
      const std::uint64_t extra = config.n_gates % workers;
      std::uint64_t begin = 0;
      for (unsigned w = 0; w < workers; ++w) {
        const std::uint64_t end = begin + chunk + (w < extra ? 1 : 0);
        threads.emplace_back([&, w, begin, end] {
          try {
            run_gates(config, begin, end, tallies[w]);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        });
        begin = end;
      }
    }
    if (error) std::rethrow_exception(error);
  }

  SimResult result;
  result.n_gates = config.n_gates;
  for (const auto& t : tallies) {
    result.n_s1 += t.s1;
    result.n_s2 += t.s2;
    result.n_coinc += t.coinc;
  }
  const double scale =
      config.setup.gate_rate_hz / static_cast<double>(config.n_gates);
  result.rates = {static_cast<double>(result.n_s1) * scale,
                  static_cast<double>(result.n_s2) * scale,
                  static_cast<double>(result.n_coinc) * scale};
  return result;
}

std::vector<SweepPoint> sweep(std::span<const double> powers_mw, const PumpMapping& map,
                              const DetectionSetup& setup,
                              std::uint64_t n_gates_per_point, std::uint64_t seed,
                              unsigned workers) {
  map.validate();
  std::vector<SweepPoint> points;
  points.reserve(powers_mw.size());
  for (std::size_t i = 0; i < powers_mw.size(); ++i) {
    SweepPoint point;
    point.power_mw = powers_mw[i];
    point.mean_pairs = mean_from_pump(map, powers_mw[i]);
    SimConfig config{n_gates_per_point, mix_seed(seed, i),
                     PairDistribution(map.kind, point.mean_pairs), setup, workers};
    point.result = simulate(config);
    points.push_back(point);
  }
  return points;
}

}  // namespace spdcstat
