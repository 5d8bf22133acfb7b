#include "cellrate/montecarlo.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "cellrate/geometry.hpp"
#include "cellrate/mmse.hpp"

namespace cellrate {

namespace detail {

std::size_t worker_count() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CELLRATE_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && v >= 1) n = std::min<std::size_t>(n, v);
  }
  return n;
}

}  // namespace detail

namespace {

constexpr std::uint64_t kGeometryTag = 0x67656f6d;  // substream salt
constexpr std::uint64_t kFadingTag = 0x66616465;

struct TrialLayout {
  PointSet nodes;
  std::vector<double> link_length;   // r_ti per node
  std::vector<std::size_t> center;   // nodes served by the origin station
};

// One node-field draw; false when the origin cell came up empty.
bool draw_nodes_once(const NearestNeighborGrid& grid, std::size_t origin_index,
                     std::size_t n_nodes, double radius, RngStream& geo,
                     TrialLayout& layout) {
  layout.nodes = sample_uniform_disk(n_nodes, DiskRegion{radius}, geo);
  layout.link_length.assign(n_nodes, 0.0);
  layout.center.clear();
  for (std::size_t i = 0; i < n_nodes; ++i) {
    const auto [idx, dist] = grid.query(layout.nodes[i]);
    layout.link_length[i] = dist;
    if (idx == origin_index) layout.center.push_back(i);
  }
  return !layout.center.empty();
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.n_nodes < 1)
    throw std::invalid_argument("ExperimentConfig: need at least one node");
  if (!(cfg.rho_w > 0.0) || !(cfg.rel_density > 0.0))
    throw std::invalid_argument("ExperimentConfig: densities must be positive");
  if (cfg.antenna_counts.empty())
    throw std::invalid_argument("ExperimentConfig: empty antenna sweep");
  for (const int n : cfg.antenna_counts)
    if (n < 1) throw std::invalid_argument("ExperimentConfig: antenna count < 1");
  if (!(cfg.noise > 0.0))
    throw std::invalid_argument("ExperimentConfig: noise must be positive");
}

std::vector<int> sorted_antennas(const ExperimentConfig& cfg) {
  std::vector<int> ns = cfg.antenna_counts;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  return ns;
}

// Evaluates one laid-out trial: assigns powers, draws fading once at the
// largest antenna count, then slices per N.
void evaluate_trial(const TrialLayout& layout, const ExperimentConfig& cfg,
                    const std::vector<int>& ns, std::uint32_t trial,
                    RngStream& geo, RngStream& fad, TrialRecord* out) {
  const std::size_t n_nodes = layout.nodes.size();
  const std::size_t rep = layout.center[geo.next_below(layout.center.size())];
  const int n_max = ns.back();

  Eigen::VectorXd rx_power(static_cast<Eigen::Index>(n_nodes) - 1);
  Eigen::Index k = 0;
  double rep_rx = 0.0;
  for (std::size_t i = 0; i < n_nodes; ++i) {
    const double tx = transmit_power(layout.link_length[i], cfg.pc);
    const double r = layout.nodes[i].norm();
    if (!(r > 0.0))
      throw std::invalid_argument("run_experiment: node at the origin");
    const double p = cfg.pc.gain * tx * std::pow(r, -cfg.pc.alpha);
    if (i == rep)
      rep_rx = p;
    else
      rx_power[k++] = p;
  }

  Eigen::VectorXcd h_unit(n_max);
  for (int a = 0; a < n_max; ++a) h_unit[a] = fad.next_cgauss();
  Eigen::MatrixXcd fading(n_max, static_cast<Eigen::Index>(n_nodes) - 1);
  for (Eigen::Index j = 0; j < fading.cols(); ++j)
    for (int a = 0; a < n_max; ++a) fading(a, j) = fad.next_cgauss();
  const Eigen::VectorXcd h = std::sqrt(rep_rx) * h_unit;

  const double rep_link = layout.link_length[rep];
  const double rep_power = transmit_power(rep_link, cfg.pc);
  for (std::size_t m = 0; m < ns.size(); ++m) {
    const int n_ant = ns[m];
    const double sinr =
        mmse_sinr(h.head(n_ant), fading.topRows(n_ant), rx_power, cfg.noise);
    out[m] = TrialRecord{trial, n_ant, sinr, spectral_efficiency(sinr),
                         rep_link, rep_power};
  }
}

// Station field + node field for one ppp trial; returns the redraw count.
std::size_t draw_ppp_trial(const PppLayout& field, double bucket,
                           std::size_t n_nodes, double radius, RngStream& geo,
                           TrialLayout& layout) {
  std::size_t redraws = 0;
  for (;;) {
    PointSet stations = sample_ppp_disk(field, geo);
    if (stations.empty()) {
      ++redraws;
      continue;
    }
    const std::size_t origin = geo.next_below(stations.size());
    const Point2 shift = stations[origin];
    for (auto& s : stations) s -= shift;
    const NearestNeighborGrid grid(std::move(stations), bucket);
    if (draw_nodes_once(grid, origin, n_nodes, radius, geo, layout))
      return redraws;
    ++redraws;
  }
}

}  // namespace

ExperimentResult run_hex_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  const std::size_t trials = cfg.resolved_trials();
  const auto ns = sorted_antennas(cfg);
  const double radius = disk_radius_for_count(static_cast<double>(cfg.n_nodes), cfg.rho_w);
  const double spacing = hex_spacing_for_density(cfg.rel_density * cfg.rho_w);
  const NearestNeighborGrid grid(hex_lattice({spacing, radius + 2.0 * spacing}), spacing);

  ExperimentResult result;
  result.records.resize(trials * ns.size());
  std::atomic<std::size_t> redraws{0};
  const RngStream master(cfg.seed);
  detail::parallel_for(trials, [&](std::size_t t) {
    RngStream geo = master.substream(kGeometryTag).substream(t);
    RngStream fad = master.substream(kFadingTag).substream(t);
    TrialLayout layout;
    std::size_t local = 0;
    while (!draw_nodes_once(grid, 0, cfg.n_nodes, radius, geo, layout)) ++local;
    if (local) redraws += local;
    evaluate_trial(layout, cfg, ns, static_cast<std::uint32_t>(t), geo, fad,
                   &result.records[t * ns.size()]);
  });
  result.redraw_count = redraws;
  return result;
}

ExperimentResult run_ppp_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  const std::size_t trials = cfg.resolved_trials();
  const auto ns = sorted_antennas(cfg);
  const double radius = disk_radius_for_count(static_cast<double>(cfg.n_nodes), cfg.rho_w);
  const double rho_t = cfg.rel_density * cfg.rho_w;
  const PppLayout field{rho_t, 8.0 * radius};
  const double bucket = 1.0 / std::sqrt(rho_t);

  ExperimentResult result;
  result.records.resize(trials * ns.size());
  std::atomic<std::size_t> redraws{0};
  const RngStream master(cfg.seed);
  detail::parallel_for(trials, [&](std::size_t t) {
    RngStream geo = master.substream(kGeometryTag).substream(t);
    RngStream fad = master.substream(kFadingTag).substream(t);
    TrialLayout layout;
    const std::size_t local =
        draw_ppp_trial(field, bucket, cfg.n_nodes, radius, geo, layout);
    if (local) redraws += local;
    evaluate_trial(layout, cfg, ns, static_cast<std::uint32_t>(t), geo, fad,
                   &result.records[t * ns.size()]);
  });
  result.redraw_count = redraws;
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  return cfg.layout == ExperimentConfig::Layout::Hex ? run_hex_experiment(cfg)
                                                     : run_ppp_experiment(cfg);
}

SeStats aggregate(std::vector<double> se_values, const std::vector<double>& outage_probs) {
  if (se_values.empty()) throw std::invalid_argument("aggregate: empty sample");
  SeStats stats;
  stats.count = se_values.size();
  double sum = 0.0;
  for (const double v : se_values) sum += v;
  stats.mean = sum / static_cast<double>(stats.count);
  if (stats.count > 1) {
    double ss = 0.0;
    for (const double v : se_values) ss += (v - stats.mean) * (v - stats.mean);
    stats.std_error = std::sqrt(ss / static_cast<double>(stats.count - 1)) /
                      std::sqrt(static_cast<double>(stats.count));
  }
  std::sort(se_values.begin(), se_values.end());
  for (const double po : outage_probs) {
    const auto t = static_cast<double>(stats.count);
    std::size_t rank = static_cast<std::size_t>(std::ceil(po * t));
    rank = std::clamp<std::size_t>(rank, 1, stats.count);
    stats.outage.emplace_back(po, se_values[rank - 1]);
  }
  return stats;
}

std::map<int, SeStats> aggregate(const std::vector<TrialRecord>& records,
                                 const std::vector<double>& outage_probs) {
  std::map<int, std::vector<double>> grouped;
  for (const auto& rec : records) grouped[rec.n_antennas].push_back(rec.se);
  std::map<int, SeStats> out;
  for (auto& [n, vals] : grouped) out.emplace(n, aggregate(std::move(vals), outage_probs));
  return out;
}

double independence_diagnostic(const ExperimentConfig& cfg) {
  validate(cfg);
  const std::size_t trials = cfg.resolved_trials();
  const double radius = disk_radius_for_count(static_cast<double>(cfg.n_nodes), cfg.rho_w);
  const RngStream master(cfg.seed);

  // Pooled second moments of (P_i, r_i) over interferers.
  double sp = 0.0, sr = 0.0, spp = 0.0, srr = 0.0, spr = 0.0;
  std::size_t n = 0;
  auto absorb = [&](const TrialLayout& layout, std::size_t rep) {
    for (std::size_t i = 0; i < layout.nodes.size(); ++i) {
      if (i == rep) continue;
      const double p = transmit_power(layout.link_length[i], cfg.pc);
      const double r = layout.nodes[i].norm();
      sp += p;
      sr += r;
      spp += p * p;
      srr += r * r;
      spr += p * r;
      ++n;
    }
  };

  if (cfg.layout == ExperimentConfig::Layout::Hex) {
    const double spacing = hex_spacing_for_density(cfg.rel_density * cfg.rho_w);
    const NearestNeighborGrid grid(hex_lattice({spacing, radius + 2.0 * spacing}), spacing);
    for (std::size_t t = 0; t < trials; ++t) {
      RngStream geo = master.substream(kGeometryTag).substream(t);
      TrialLayout layout;
      while (!draw_nodes_once(grid, 0, cfg.n_nodes, radius, geo, layout)) {
      }
      absorb(layout, layout.center[geo.next_below(layout.center.size())]);
    }
  } else {
    const double rho_t = cfg.rel_density * cfg.rho_w;
    const PppLayout field{rho_t, 8.0 * radius};
    for (std::size_t t = 0; t < trials; ++t) {
      RngStream geo = master.substream(kGeometryTag).substream(t);
      TrialLayout layout;
      draw_ppp_trial(field, 1.0 / std::sqrt(rho_t), cfg.n_nodes, radius, geo, layout);
      absorb(layout, layout.center[geo.next_below(layout.center.size())]);
    }
  }

  const double dn = static_cast<double>(n);
  const double var_p = spp / dn - (sp / dn) * (sp / dn);
  const double var_r = srr / dn - (sr / dn) * (sr / dn);
  if (var_p <= 0.0 || var_r <= 0.0) return 0.0;  // zero-variance convention
  const double cov = spr / dn - (sp / dn) * (sr / dn);
  return cov / std::sqrt(var_p * var_r);
}

}  // namespace cellrate
