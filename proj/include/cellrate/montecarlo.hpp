#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <map>
#include <thread>
#include <vector>

#include "cellrate/powerctl.hpp"

namespace cellrate {

// Full description of one simulation campaign. Defaults follow the published
// protocol: 4000 nodes, thermal noise 1e-15 W (hex) / 1e-14 W (ppp), target
// received SNR 30 dB, G_t = 1e-5 m^alpha, alpha = 4.
struct ExperimentConfig {
  enum class Layout { Hex, Ppp };
  Layout layout = Layout::Hex;
  double rho_w = 1e-3;          // wireless-node density [m^-2]
  double rel_density = 0.2;     // rho_h/rho_w or rho_t/rho_w
  std::size_t n_nodes = 4000;
  std::size_t trials = 0;       // 0 -> layout default (5000 hex, 1000 ppp)
  std::vector<int> antenna_counts{16};
  PowerControl pc{1e-12, 1e-5, 0.2, 4.0};
  double noise = 1e-15;         // sigma-bar^2 [W]
  std::uint64_t seed = 1;

  std::size_t resolved_trials() const {
    if (trials) return trials;
    return layout == Layout::Hex ? 5000 : 1000;
  }
};

// One representative-link evaluation.
struct TrialRecord {
  std::uint32_t trial = 0;
  int n_antennas = 0;
  double sinr = 0.0;
  double se = 0.0;        // b/s/Hz
  double rep_link = 0.0;  // r_1 [m]
  double rep_power = 0.0; // P_1 [W]
};

struct ExperimentResult {
  std::vector<TrialRecord> records;  // trial-major, antenna counts ascending
  std::size_t redraw_count = 0;
};

// Aggregated spectral-efficiency statistics.
struct SeStats {
  double mean = 0.0;
  double std_error = 0.0;
  // (outage probability, SE achieved or exceeded by a 1-P_o fraction)
  std::vector<std::pair<double, double>> outage;
  std::size_t count = 0;
};

// Hexagonal-lattice protocol: circular node field over a lattice that
// extends 2d past the field edge, representative drawn uniformly from the
// origin cell, all other nodes interfere. One layout and one fading draw per
// trial; antenna sweeps slice the fading to the first N rows. Trials run in
// a parallel map (CELLRATE_THREADS caps the worker count) and the record
// order is independent of scheduling.
ExperimentResult run_hex_experiment(const ExperimentConfig& cfg);

// Poisson-cell protocol: stations on a disk of radius 8R, re-centered so a
// uniformly chosen station sits at the origin, nodes in radius R. Trials with
// no station or an empty center cell are redrawn and counted.
ExperimentResult run_ppp_experiment(const ExperimentConfig& cfg);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Mean, standard error, and nearest-rank lower quantiles (rank ceil(P_o*T)).
// Throws std::invalid_argument on empty input.
SeStats aggregate(std::vector<double> se_values, const std::vector<double>& outage_probs);

// Per-antenna-count aggregation of an experiment's records.
std::map<int, SeStats> aggregate(const std::vector<TrialRecord>& records,
                                 const std::vector<double>& outage_probs);

// Sample correlation between interferer transmit power and distance to the
// origin receiver, pooled over trials; 0 under zero variance. Uses the same
// geometry substreams as the experiments, so running it never perturbs them.
double independence_diagnostic(const ExperimentConfig& cfg);

namespace detail {

// Worker count = min(hardware, CELLRATE_THREADS when set).
std::size_t worker_count();

// Deterministic parallel index map: work items are self-contained, so the
// result layout cannot depend on scheduling.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const std::size_t workers =
      std::min(worker_count(), std::max<std::size_t>(count, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (failed.load()) std::rethrow_exception(error);
}

}  // namespace detail

}  // namespace cellrate
