#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <vector>

#include "cellrate/geometry.hpp"
#include "cellrate/montecarlo.hpp"

using namespace cellrate;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ExperimentConfig small_hex() {
  ExperimentConfig cfg;
  cfg.layout = ExperimentConfig::Layout::Hex;
  cfg.rho_w = 1e-3;
  cfg.rel_density = 0.2;
  cfg.n_nodes = 200;
  cfg.trials = 20;
  cfg.antenna_counts = {2, 4};
  cfg.pc = PowerControl{1e-12, 1e-5, 0.2, 4.0};
  cfg.noise = 1e-15;
  cfg.seed = 99;
  return cfg;
}

bool same_records(const std::vector<TrialRecord>& a, const std::vector<TrialRecord>& b) {
  if (a.size() != b.size()) return false;
  return std::memcmp(a.data(), b.data(), a.size() * sizeof(TrialRecord)) == 0;
}

}  // namespace

TEST_CASE("records are byte-identical across thread counts and reruns") {
  const ExperimentConfig cfg = small_hex();
  setenv("CELLRATE_THREADS", "1", 1);
  const auto serial = run_hex_experiment(cfg);
  setenv("CELLRATE_THREADS", "3", 1);
  const auto parallel = run_hex_experiment(cfg);
  unsetenv("CELLRATE_THREADS");
  const auto again = run_hex_experiment(cfg);
  CHECK(same_records(serial.records, parallel.records));
  CHECK(same_records(serial.records, again.records));
  CHECK(serial.redraw_count == parallel.redraw_count);

  ExperimentConfig other = cfg;
  other.seed = 100;
  CHECK_FALSE(same_records(serial.records, run_hex_experiment(other).records));

  ExperimentConfig ppp = cfg;
  ppp.layout = ExperimentConfig::Layout::Ppp;
  ppp.trials = 8;
  ppp.noise = 1e-14;
  setenv("CELLRATE_THREADS", "1", 1);
  const auto ppp1 = run_ppp_experiment(ppp);
  setenv("CELLRATE_THREADS", "3", 1);
  const auto ppp2 = run_ppp_experiment(ppp);
  unsetenv("CELLRATE_THREADS");
  CHECK(same_records(ppp1.records, ppp2.records));
}

TEST_CASE("record stream is trial-major with consistent fields") {
  ExperimentConfig cfg = small_hex();
  const auto result = run_hex_experiment(cfg);
  REQUIRE(result.records.size() == cfg.trials * 2);
  const double spacing = hex_spacing_for_density(cfg.rel_density * cfg.rho_w);
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    const auto& rec = result.records[i];
    CHECK(rec.trial == i / 2);
    CHECK(rec.n_antennas == (i % 2 ? 4 : 2));
    CHECK(rec.sinr >= 0.0);
    CHECK(rec.se == doctest::Approx(std::log2(1.0 + rec.sinr)).epsilon(1e-12));
    // the representative lives in the origin cell
    CHECK(rec.rep_link <= spacing / kSqrt3 * (1.0 + 1e-12));
    CHECK(rec.rep_power <= cfg.pc.max_power);
    CHECK(rec.rep_power ==
          doctest::Approx(transmit_power(rec.rep_link, cfg.pc)).epsilon(1e-12));
  }
}

TEST_CASE("aggregate: nearest-rank outage and moments") {
  const auto stats = aggregate({1.0, 2.0, 3.0, 4.0}, {0.25, 0.5});
  CHECK(stats.mean == doctest::Approx(2.5));
  CHECK(stats.count == 4);
  CHECK(stats.outage[0].second == 1.0);  // rank ceil(0.25*4) = 1
  CHECK(stats.outage[1].second == 2.0);

  const auto flat = aggregate({1.5, 1.5, 1.5}, {0.05, 0.25, 0.5});
  CHECK(flat.std_error == 0.0);
  for (const auto& [p, q] : flat.outage) CHECK(q == flat.mean);

  RngStream rng(5);
  std::vector<double> vals;
  for (int i = 0; i < 500; ++i) vals.push_back(rng.next_double() * 7.0);
  const auto s = aggregate(vals, {0.05, 0.25, 0.5});
  CHECK(s.outage[0].second <= s.outage[1].second);
  CHECK(s.outage[1].second <= s.outage[2].second);

  CHECK_THROWS_AS(aggregate(std::vector<double>{}, {0.5}), std::invalid_argument);
}

TEST_CASE("mean spectral efficiency increases with antennas") {
  ExperimentConfig cfg = small_hex();
  cfg.n_nodes = 500;
  cfg.trials = 300;
  cfg.antenna_counts = {1, 2, 4, 8};
  cfg.pc.max_power = kInf;
  const auto result = run_hex_experiment(cfg);
  const auto stats = aggregate(result.records, {});
  double prev_mean = -1.0, prev_se = 0.0;
  for (const auto& [n, s] : stats) {
    if (prev_mean >= 0.0) {
      const double sigma = std::sqrt(s.std_error * s.std_error + prev_se * prev_se);
      CHECK(s.mean - prev_mean > 3.0 * sigma);
    }
    prev_mean = s.mean;
    prev_se = s.std_error;
  }
}

TEST_CASE("redraws stay rare at protocol scale") {
  ExperimentConfig cfg;
  cfg.layout = ExperimentConfig::Layout::Hex;
  cfg.rho_w = 1e-3;
  cfg.rel_density = 0.1;  // ~10 nodes expected in the origin cell
  cfg.n_nodes = 4000;
  cfg.trials = 200;
  cfg.antenna_counts = {1};
  cfg.pc = PowerControl{1e-12, 1e-5, kInf, 4.0};
  cfg.noise = 1e-15;
  cfg.seed = 3;
  const auto result = run_hex_experiment(cfg);
  CHECK(result.redraw_count * 100 <= cfg.trials);
}

TEST_CASE("full-power fraction grows as the node density drops") {
  auto frac_at_cap = [](double rho_w) {
    ExperimentConfig cfg;
    cfg.layout = ExperimentConfig::Layout::Hex;
    cfg.rho_w = rho_w;
    cfg.rel_density = 0.1;
    cfg.n_nodes = 1000;
    cfg.trials = 200;
    cfg.antenna_counts = {1};
    cfg.pc = PowerControl{1e-12, 1e-5, 0.2, 4.0};
    cfg.noise = 1e-15;
    cfg.seed = 17;
    const auto result = run_hex_experiment(cfg);
    int capped = 0;
    for (const auto& rec : result.records)
      if (rec.rep_power == cfg.pc.max_power) ++capped;
    return static_cast<double>(capped) / static_cast<double>(result.records.size());
  };
  CHECK(frac_at_cap(1e-4) > frac_at_cap(1e-3));
}

TEST_CASE("power/distance correlation: small in-law, zero variance, edge effect") {
  ExperimentConfig cfg;
  cfg.layout = ExperimentConfig::Layout::Hex;
  cfg.rho_w = 1e-3;
  cfg.rel_density = 0.2;
  cfg.n_nodes = 4000;
  cfg.trials = 25;  // 1e5 pooled interferers
  cfg.antenna_counts = {1};
  cfg.pc = PowerControl{1e-12, 1e-5, kInf, 4.0};
  cfg.noise = 1e-15;
  cfg.seed = 11;
  const double corr = independence_diagnostic(cfg);
  CHECK(std::abs(corr) < 0.02);

  // saturated power control has zero power variance
  ExperimentConfig flat = cfg;
  flat.trials = 5;
  flat.pc = PowerControl{1e9, 1e-5, 0.2, 4.0};
  CHECK(independence_diagnostic(flat) == 0.0);

  // a small network with the same lattice spacing shows the edge bias
  ExperimentConfig small = cfg;
  small.rho_w = 1e-1;       // radius shrinks 10x
  small.rel_density = 2e-3; // same rho_h, so same spacing
  small.trials = 25;
  const double edge_corr = independence_diagnostic(small);
  CHECK(std::abs(edge_corr) > std::abs(corr));

  ExperimentConfig ppp = cfg;
  ppp.layout = ExperimentConfig::Layout::Ppp;
  ppp.trials = 10;
  CHECK(std::abs(independence_diagnostic(ppp)) < 0.05);
}
