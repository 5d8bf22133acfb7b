// cellrate — uplink spectral efficiency of multi-antenna cellular networks,
// by Monte-Carlo simulation and by the asymptotic formulas, with CSV output
// for overlay plotting.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cellrate/asymptotic.hpp"
#include "cellrate/geometry.hpp"
#include "cellrate/montecarlo.hpp"
#include "cellrate/quadrature.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cellrate;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr double kInf = std::numeric_limits<double>::infinity();

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shortest decimal that round-trips to the same double.
std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (const char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

// Antenna sweep: comma list of integers and inclusive "a..b" ranges.
std::vector<int> parse_antenna_sweep(const std::string& text) {
  std::vector<int> out;
  for (const auto& tok : split(text, ',')) {
    if (tok.empty()) throw UsageError("--n: empty element in '" + text + "'");
    const auto dots = tok.find("..");
    try {
      if (dots == std::string::npos) {
        out.push_back(std::stoi(tok));
      } else {
        const int lo = std::stoi(tok.substr(0, dots));
        const int hi = std::stoi(tok.substr(dots + 2));
        if (hi < lo) throw UsageError("--n: descending range '" + tok + "'");
        for (int v = lo; v <= hi; ++v) out.push_back(v);
      }
    } catch (const std::invalid_argument&) {
      throw UsageError("--n: cannot parse '" + tok + "'");
    }
  }
  for (const int v : out)
    if (v < 1) throw UsageError("--n: antenna counts must be >= 1");
  return out;
}

std::vector<double> parse_probs(const std::string& text) {
  std::vector<double> out;
  for (const auto& tok : split(text, ',')) {
    const double p = std::stod(tok);
    if (!(p > 0.0 && p < 1.0))
      throw UsageError("--outage-probs: probabilities must lie in (0,1)");
    out.push_back(p);
  }
  return out;
}

double parse_power(const std::string& text) {
  std::string t = text;
  for (auto& c : t) c = static_cast<char>(std::tolower(c));
  if (t == "inf" || t == "+inf" || t == "infinity") return kInf;
  return std::stod(text);
}

std::string outage_column_name(double prob) {
  const double pct = prob * 100.0;
  char buf[32];
  if (pct == std::floor(pct) && pct < 100.0)
    std::snprintf(buf, sizeof(buf), "outage_p%02d", static_cast<int>(pct));
  else
    std::snprintf(buf, sizeof(buf), "outage_p%g", pct);
  return buf;
}

// Options shared by the subcommands; resolved values are echoed into the
// manifest so a run can be reproduced from it.
struct Options {
  std::string layout = "hex";
  double alpha = 4.0;
  double rho_w = 1e-3;
  double rel_density = 0.2;
  std::string antennas = "16";
  std::size_t n_nodes = 4000;
  std::size_t trials = 0;  // 0 -> layout default
  std::string pm = "0.2";
  double target_snr_db = 30.0;
  double noise = 0.0;  // 0 -> layout default
  double gain = 1e-5;
  std::uint64_t seed = 1;
  std::string outage_probs = "0.05,0.25,0.5";
  std::string out_dir;
  double scale = 1.0;
  // asymptotic-only knobs
  std::string formula = "eq13";
  double c_ratio = 1000.0;
  double sigma2 = -1.0;  // <0 -> map from noise per N
  double r1 = 30.0;
  double p1 = 1.0;
  double point_power = 1.0;
  double spacing = 0.0;             // optional explicit lattice spacing
  std::string power_model = "point";  // dist for eq8/fixed-point

  double resolved_noise() const {
    if (noise > 0.0) return noise;
    return layout == "ppp" ? 1e-14 : 1e-15;
  }
  double target_rx_power() const {
    return resolved_noise() * std::pow(10.0, target_snr_db / 10.0);
  }
  PowerControl power_control() const {
    return PowerControl{target_rx_power(), gain, parse_power(pm), alpha};
  }
  double hex_spacing() const {
    if (spacing > 0.0) return spacing;
    return hex_spacing_for_density(rel_density * rho_w);
  }
};

void add_common_flags(CLI::App* app, Options& o) {
  app->add_option("--layout", o.layout, "Cell model: hex | ppp")
      ->check(CLI::IsMember({"hex", "ppp"}));
  app->add_option("--alpha", o.alpha, "Path-loss exponent (> 2)");
  app->add_option("--rho-w", o.rho_w, "Wireless-node density [m^-2]");
  app->add_option("--rel-density", o.rel_density,
                  "Base-station density relative to rho-w");
  app->add_option("--n", o.antennas, "Antenna sweep, e.g. 16 or 1,2,4 or 1..64");
  app->add_option("--nodes", o.n_nodes, "Wireless nodes per trial");
  app->add_option("--trials", o.trials, "Trials (0 = protocol default)");
  app->add_option("--pm-watts", o.pm, "Max transmit power [W], or 'inf'");
  app->add_option("--target-snr-db", o.target_snr_db,
                  "Target received SNR over the noise floor [dB]");
  app->add_option("--noise-watts", o.noise,
                  "Thermal noise power [W] (default 1e-15 hex, 1e-14 ppp)");
  app->add_option("--gt", o.gain, "Path gain constant G_t [m^alpha]");
  app->add_option("--seed", o.seed, "Master seed");
  app->add_option("--outage-probs", o.outage_probs, "Outage probabilities");
  app->add_option("--out-dir", o.out_dir, "Output directory");
  app->add_option("--scale", o.scale, "Trial-count scale factor for desk runs");
  app->set_config("--config", "", "Flat key=value config file (flags override)");
}

json options_json(const Options& o) {
  return json{{"layout", o.layout},
              {"alpha", o.alpha},
              {"rho_w", o.rho_w},
              {"rel_density", o.rel_density},
              {"n", o.antennas},
              {"nodes", o.n_nodes},
              {"trials", o.trials},
              {"pm_watts", o.pm},
              {"target_snr_db", o.target_snr_db},
              {"noise_watts", o.resolved_noise()},
              {"gt", o.gain},
              {"seed", o.seed},
              {"outage_probs", o.outage_probs},
              {"scale", o.scale}};
}

struct ManifestEntry {
  std::string curve;
  std::string path;
  std::size_t trials = 0;
  std::size_t redraws = 0;
};

void write_manifest(const fs::path& dir, const std::string& command,
                    const Options& o, const std::vector<ManifestEntry>& outputs,
                    const std::vector<std::string>& warnings, double wall_seconds) {
  json m;
  m["schema_version"] = "1";
  m["artifact_version"] = kVersion;
  m["command"] = command;
  m["seed"] = o.seed;
  m["config"] = options_json(o);
  m["outputs"] = json::array();
  for (const auto& e : outputs) {
    m["outputs"].push_back(json{{"curve", e.curve},
                                {"path", e.path},
                                {"trials", e.trials},
                                {"redraws", e.redraws}});
  }
  m["warnings"] = warnings;
  m["wall_clock_seconds"] = wall_seconds;
  std::ofstream out(dir / "manifest.json");
  out << m.dump(2) << "\n";
}

void write_asymptotic_csv(std::ostream& out, const std::vector<int>& ns,
                          const std::vector<double>& se) {
  out << "# cellrate asymptotic curve\n";
  out << "# units: n_antennas count, asymptotic_se_bps_hz b/s/Hz\n";
  out << "n_antennas,asymptotic_se_bps_hz\n";
  for (std::size_t i = 0; i < ns.size(); ++i)
    out << ns[i] << "," << format_double(se[i]) << "\n";
}

void write_simulated_csv(std::ostream& out, const std::vector<int>& ns,
                         const std::map<int, SeStats>& stats,
                         const std::vector<double>& probs,
                         const std::vector<double>& asymptotic) {
  out << "# cellrate simulated curve\n";
  out << "# units: spectral efficiency b/s/Hz; stderr b/s/Hz\n";
  out << "n_antennas,mean_se_bps_hz,stderr";
  for (const double p : probs) out << "," << outage_column_name(p);
  out << ",asymptotic_se_bps_hz\n";
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const SeStats& s = stats.at(ns[i]);
    out << ns[i] << "," << format_double(s.mean) << ","
        << format_double(s.std_error);
    for (const auto& [p, q] : s.outage) out << "," << format_double(q);
    out << "," << format_double(asymptotic[i]) << "\n";
  }
}

// Asymptotic mean SE matched to an experiment config (overlay column).
double companion_asymptotic(const Options& o, const PowerControl& pc, int n_ant) {
  if (o.layout == "ppp")
    return mean_se_ppp(n_ant, o.rel_density * o.rho_w, o.rho_w, pc);
  return mean_se_hex_insufficient(n_ant, o.hex_spacing(), o.rho_w, pc);
}

double evaluate_formula(const Options& o, const std::string& formula, int n_ant) {
  const PowerControl pc = o.power_control();
  if (formula == "eq13")
    return mean_se_hex_sufficient(n_ant, o.hex_spacing(), o.rho_w, o.alpha);
  if (formula == "eq24")
    return mean_se_hex_by_density(n_ant, o.rel_density * o.rho_w, o.rho_w, o.alpha,
                                  kHexDensityConstantRounded);
  if (formula == "eq16")
    return mean_se_hex_insufficient(n_ant, o.hex_spacing(), o.rho_w, pc);
  if (formula == "eq21")
    return mean_se_ppp(n_ant, o.rel_density * o.rho_w, o.rho_w, pc);
  if (formula == "eq23") {
    PowerControl open = pc;
    open.max_power = kInf;
    return mean_se_ppp(n_ant, o.rel_density * o.rho_w, o.rho_w, open);
  }
  if (formula == "eq8" || formula == "fixed-point") {
    PowerDistribution dist = [&] {
      if (o.power_model == "ppp")
        return PowerDistribution::ppp_cells(pc, o.rel_density * o.rho_w);
      if (o.power_model == "hex")
        return PowerDistribution::hex_cells(pc, o.hex_spacing());
      return PowerDistribution::point_mass(o.point_power, o.alpha);
    }();
    if (formula == "eq8") {
      const double sinr = sinr_approx(n_ant, o.r1, o.p1, dist, o.rho_w, o.alpha);
      return std::log2(1.0 + sinr);
    }
    AsymptoticParams params{o.alpha, o.rho_w, o.c_ratio, 0.0, o.gain, o.r1, o.p1, dist};
    params.sigma2 = o.sigma2 >= 0.0
                        ? o.sigma2
                        : o.resolved_noise() * std::pow(n_ant, o.alpha / 2.0 - 1.0);
    const double beta = solve_fixed_point(params);
    return std::log2(1.0 + std::pow(n_ant, o.alpha / 2.0) * beta);
  }
  throw UsageError("unknown formula '" + formula + "'");
}

int run_asymptotic(const Options& o, const std::string& command) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<int> ns = parse_antenna_sweep(o.antennas);
  std::vector<double> se;
  se.reserve(ns.size());
  for (const int n : ns) se.push_back(evaluate_formula(o, o.formula, n));

  if (o.out_dir.empty()) {
    write_asymptotic_csv(std::cout, ns, se);
    return 0;
  }
  fs::create_directories(o.out_dir);
  const fs::path path = fs::path(o.out_dir) / ("asymptotic_" + o.formula + ".csv");
  std::ofstream out(path);
  write_asymptotic_csv(out, ns, se);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(o.out_dir, command, o, {{o.formula, path.string(), 0, 0}}, {}, wall);
  std::cout << "wrote " << path.string() << "\n";
  return 0;
}

ExperimentConfig experiment_config(const Options& o) {
  ExperimentConfig cfg;
  cfg.layout = o.layout == "ppp" ? ExperimentConfig::Layout::Ppp
                                 : ExperimentConfig::Layout::Hex;
  cfg.rho_w = o.rho_w;
  cfg.rel_density = o.rel_density;
  cfg.n_nodes = o.n_nodes;
  cfg.antenna_counts = parse_antenna_sweep(o.antennas);
  cfg.pc = o.power_control();
  cfg.noise = o.resolved_noise();
  cfg.seed = o.seed;
  cfg.trials = o.trials ? o.trials : cfg.resolved_trials();
  if (o.scale != 1.0) {
    cfg.trials = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(cfg.trials * o.scale)));
  }
  return cfg;
}

int run_simulate(const Options& o, const std::string& command) {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig cfg = experiment_config(o);
  const std::vector<double> probs = parse_probs(o.outage_probs);

  std::vector<std::string> warnings;
  if (o.rel_density >= 1.0)
    warnings.push_back("rel_density >= 1: more base stations than wireless nodes");

  const ExperimentResult result = run_experiment(cfg);
  const auto stats = aggregate(result.records, probs);
  if (result.redraw_count * 100 > cfg.trials)
    warnings.push_back("config error: redraw count exceeds 1% of trials");

  std::vector<int> ns = cfg.antenna_counts;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  std::vector<double> asym;
  asym.reserve(ns.size());
  for (const int n : ns) asym.push_back(companion_asymptotic(o, cfg.pc, n));

  const fs::path dir = o.out_dir.empty() ? fs::path("cellrate_out") : fs::path(o.out_dir);
  fs::create_directories(dir);
  const fs::path path = dir / "simulate.csv";
  {
    std::ofstream out(path);
    write_simulated_csv(out, ns, stats, probs, asym);
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(dir, command, o,
                 {{"simulate", path.string(), cfg.trials, result.redraw_count}},
                 warnings, wall);
  std::cout << "wrote " << path.string() << " (" << cfg.trials << " trials, "
            << result.redraw_count << " redraws)\n";
  return 0;
}

struct Curve {
  std::string name;
  bool simulated = false;
  Options opts;  // fully resolved per-curve options
};

std::vector<Curve> figure_curves(const std::string& preset, const Options& base) {
  auto sim = [&](const std::string& name, const std::string& layout, double rho_w,
                 double rel, const std::string& pm, const std::string& n_list,
                 std::size_t trials) {
    Curve c;
    c.name = name;
    c.simulated = true;
    c.opts = base;
    c.opts.layout = layout;
    c.opts.rho_w = rho_w;
    c.opts.rel_density = rel;
    c.opts.pm = pm;
    c.opts.antennas = n_list;
    c.opts.trials = trials;
    return c;
  };
  auto asym = [&](const std::string& name, const std::string& formula,
                  const std::string& layout, double rho_w, double rel,
                  const std::string& pm, const std::string& n_list) {
    Curve c;
    c.name = name;
    c.simulated = false;
    c.opts = base;
    c.opts.formula = formula;
    c.opts.layout = layout;
    c.opts.rho_w = rho_w;
    c.opts.rel_density = rel;
    c.opts.pm = pm;
    c.opts.antennas = n_list;
    return c;
  };

  std::vector<Curve> curves;
  if (preset == "fig3") {
    const std::string ns = "1,2,4,8,12,16,24,32";
    curves.push_back(sim("sim_rhow1e-3", "hex", 1e-3, 0.2, "inf", ns, 5000));
    curves.push_back(sim("sim_rhow1e-2", "hex", 1e-2, 0.2, "inf", ns, 5000));
    curves.push_back(asym("asym_eq13", "eq13", "hex", 1e-3, 0.2, "inf", ns));
  } else if (preset == "fig4") {
    const std::string ns = "8..20";
    curves.push_back(sim("sim_outage", "hex", 1e-2, 0.1, "inf", ns, 5000));
    curves.push_back(asym("asym_eq13", "eq13", "hex", 1e-2, 0.1, "inf", ns));
  } else if (preset == "fig5" || preset == "fig6") {
    const double rho_w = preset == "fig5" ? 1e-4 : 1e-2;
    const std::string ns = "1,2,4,6,8,12,16";
    for (const double rel : {0.2, 0.1, 0.05, 0.025}) {
      const std::string tag = "rel" + std::to_string(static_cast<int>(rel * 1000));
      curves.push_back(sim("sim_" + tag, "hex", rho_w, rel, "0.2", ns, 5000));
      curves.push_back(asym("asym_eq16_" + tag, "eq16", "hex", rho_w, rel, "0.2", ns));
    }
  } else if (preset == "fig7") {
    const std::string ns = "2,4,6,8,10,12,16";
    for (const double rho_w : {1e-4, 1e-3}) {
      const std::string tag = rho_w == 1e-4 ? "rhow1e-4" : "rhow1e-3";
      curves.push_back(sim("sim_" + tag, "hex", rho_w, 0.1, "0.2", ns, 5000));
      curves.push_back(asym("asym_eq16_" + tag, "eq16", "hex", rho_w, 0.1, "0.2", ns));
    }
  } else if (preset == "fig9" || preset == "fig10") {
    const std::string pm = preset == "fig9" ? "inf" : "0.2";
    const std::string formula = preset == "fig9" ? "eq23" : "eq21";
    const std::string ns = "2,4,8,12,16,24,32";
    for (const double rel : {0.2, 0.1, 0.05}) {
      const std::string tag = "rel" + std::to_string(static_cast<int>(rel * 1000));
      curves.push_back(sim("sim_" + tag, "ppp", 1e-3, rel, pm, ns, 1000));
      curves.push_back(asym("asym_" + formula + "_" + tag, formula, "ppp", 1e-3, rel, pm, ns));
    }
  } else if (preset == "fig11") {
    const std::string ns = "1..40";
    for (const double rel : {0.2, 0.1, 0.05}) {
      const std::string tag = "rel" + std::to_string(static_cast<int>(rel * 1000));
      curves.push_back(asym("asym_hex_" + tag, "eq16", "hex", 1e-3, rel, "0.2", ns));
      curves.push_back(asym("asym_ppp_" + tag, "eq21", "ppp", 1e-3, rel, "0.2", ns));
    }
  } else {
    throw UsageError(
        "unknown preset '" + preset +
        "'; valid presets: fig3 fig4 fig5 fig6 fig7 fig9 fig10 fig11");
  }
  return curves;
}

int run_figure(const std::string& preset, const Options& base,
               const std::string& command) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<Curve> curves = figure_curves(preset, base);
  const fs::path dir =
      base.out_dir.empty() ? fs::path("cellrate_out") / preset : fs::path(base.out_dir);
  fs::create_directories(dir);

  std::vector<ManifestEntry> outputs;
  std::vector<std::string> warnings;
  for (const Curve& curve : curves) {
    const Options& o = curve.opts;
    const std::vector<int> ns = parse_antenna_sweep(o.antennas);
    const fs::path path = dir / (preset + "_" + curve.name + ".csv");
    std::ofstream out(path);
    if (!curve.simulated) {
      std::vector<double> se;
      se.reserve(ns.size());
      for (const int n : ns) se.push_back(evaluate_formula(o, o.formula, n));
      write_asymptotic_csv(out, ns, se);
      outputs.push_back({curve.name, path.string(), 0, 0});
    } else {
      Options scaled = o;
      const ExperimentConfig cfg = experiment_config(scaled);
      const std::vector<double> probs = parse_probs(o.outage_probs);
      const ExperimentResult result = run_experiment(cfg);
      const auto stats = aggregate(result.records, probs);
      std::vector<double> asym;
      asym.reserve(ns.size());
      for (const int n : ns) asym.push_back(companion_asymptotic(o, cfg.pc, n));
      write_simulated_csv(out, ns, stats, probs, asym);
      if (result.redraw_count * 100 > cfg.trials)
        warnings.push_back("config error: redraws exceed 1% of trials on " + curve.name);
      outputs.push_back({curve.name, path.string(), cfg.trials, result.redraw_count});
    }
    std::cout << "wrote " << path.string() << "\n";
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(dir, command, base, outputs, warnings, wall);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::string command;
  for (int i = 0; i < argc; ++i) {
    if (i) command += ' ';
    command += argv[i];
  }

  CLI::App app{"uplink spectral efficiency: simulation and asymptotics"};
  app.require_subcommand(1);

  Options asym_opts;
  CLI::App* cmd_asym = app.add_subcommand(
      "asymptotic", "evaluate a closed-form or fixed-point SE curve");
  add_common_flags(cmd_asym, asym_opts);
  cmd_asym
      ->add_option("--formula", asym_opts.formula,
                   "eq8 | eq13 | eq16 | eq21 | eq23 | eq24 | fixed-point")
      ->check(CLI::IsMember({"eq8", "eq13", "eq16", "eq21", "eq23", "eq24", "fixed-point"}));
  cmd_asym->add_option("--c", asym_opts.c_ratio, "interferers per antenna (fixed point)");
  cmd_asym->add_option("--sigma2", asym_opts.sigma2,
                       "normalized noise constant (fixed point); default maps noise");
  cmd_asym->add_option("--r1", asym_opts.r1, "representative link length [m]");
  cmd_asym->add_option("--p1", asym_opts.p1, "representative transmit power [W]");
  cmd_asym->add_option("--point-power", asym_opts.point_power,
                       "interferer power for the point-mass model [W]");
  cmd_asym->add_option("--spacing", asym_opts.spacing,
                       "explicit lattice spacing d [m] (overrides rel-density)");
  cmd_asym->add_option("--power-model", asym_opts.power_model,
                       "power model for eq8/fixed-point: hex | ppp | point")
      ->check(CLI::IsMember({"hex", "ppp", "point"}));

  Options sim_opts;
  CLI::App* cmd_sim =
      app.add_subcommand("simulate", "run the Monte-Carlo protocol and aggregate");
  add_common_flags(cmd_sim, sim_opts);

  Options fig_opts;
  std::string preset;
  CLI::App* cmd_fig =
      app.add_subcommand("figure", "emit the simulated+asymptotic curves of a figure preset");
  cmd_fig->add_option("preset", preset, "fig3 fig4 fig5 fig6 fig7 fig9 fig10 fig11")
      ->required();
  add_common_flags(cmd_fig, fig_opts);

  try {
    app.parse(argc, argv);
    if (cmd_asym->parsed()) return run_asymptotic(asym_opts, command);
    if (cmd_sim->parsed()) return run_simulate(sim_opts, command);
    return run_figure(preset, fig_opts, command);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
