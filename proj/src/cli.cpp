#include "ewac/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ewac/config.hpp"
#include "ewac/engine.hpp"
#include "ewac/errors.hpp"
#include "ewac/scenario.hpp"

namespace ewac::cli {

using nlohmann::json;

namespace {

// EWAC_LOG=debug turns on solver diagnostics on stderr.
bool debug_logging() {
  const char* level = std::getenv("EWAC_LOG");
  return level != nullptr && std::string(level) == "debug";
}

double round12(double value) { return std::stod(format_number(value)); }

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(round12(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string optional_field(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

// Flag values that override the config file when given. Every subcommand
// binds the same storage; presence is checked on the parsed subcommand.
struct Overrides {
  std::string config_file;
  double eta = 0.5;
  std::string path;
  std::string constraints;
  int samples = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::vector<double> eta_grid;
  std::vector<std::int64_t> horizons;
  std::vector<std::string> thetas;
};

void add_common_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_file, "JSON experiment configuration");
  cmd->add_option("--eta", o.eta, "canonical model fairness parameter in [0,1]");
  cmd->add_option("--path", o.path, "builtin:1, builtin:2, file:<name> or 3,5,1,...");
  cmd->add_option("--constraints", o.constraints, "none, pm or cs");
  cmd->add_option("--samples", o.samples, "Monte-Carlo sample count");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--out", o.out, "output file (default: stdout)");
}

bool given(const CLI::App& cmd, const char* flag) {
  const CLI::Option* opt = cmd.get_option_no_throw(flag);
  return opt != nullptr && opt->count() > 0;
}

ExperimentConfig effective_config(const Overrides& o, const CLI::App& cmd) {
  ExperimentConfig cfg;
  if (!o.config_file.empty()) cfg = load_config(o.config_file);
  if (given(cmd, "--eta")) {
    cfg.eta = o.eta;
    cfg.model.reset();
  }
  if (given(cmd, "--path")) cfg.path = o.path;
  if (given(cmd, "--constraints")) cfg.constraints = parse_constraint_set(o.constraints);
  if (given(cmd, "--samples")) cfg.samples = o.samples;
  if (given(cmd, "--seed")) cfg.seed = o.seed;
  if (given(cmd, "--out")) cfg.out = o.out;
  if (given(cmd, "--eta-grid")) cfg.eta_grid = o.eta_grid;
  if (given(cmd, "--horizons")) cfg.horizon_grid = o.horizons;
  if (given(cmd, "--theta")) cfg.thetas = o.thetas;
  return cfg;
}

void emit(const ExperimentConfig& cfg, std::ostream& out, const std::string& text) {
  if (cfg.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(cfg.out, std::ios::binary);
  if (!file) throw InvalidInput("cannot open output file '" + cfg.out + "'");
  file << text;
}

std::string cmd_smooth(const ExperimentConfig& cfg) {
  const HmmModel model = resolve_model(cfg);
  const ObservationPath obs = resolve_path(cfg.path, model.num_symbols());
  const SmoothedPosterior post = smooth(model, obs);
  std::ostringstream os;
  os << kSmoothHeader << '\n';
  for (Eigen::Index t = 0; t < post.size(); ++t) {
    os << t + 1 << ',' << format_number(post.fair(t)) << ',' << format_number(post.biased(t)) << '\n';
  }
  return os.str();
}

std::string cmd_bounds(const ExperimentConfig& cfg) {
  const HmmModel model = resolve_model(cfg);
  const ObservationPath obs = resolve_path(cfg.path, model.num_symbols());
  const PointAnalysis a = analyze(model, obs, cfg.constraints);
  if (debug_logging()) {
    std::cerr << "bounds: simplex iterations " << a.homogeneous.iterations << '\n';
  }

  json report;
  report["T"] = obs.size();
  report["constraints"] = std::string(to_string(cfg.constraints));
  report["lb"] = round12(a.homogeneous.lb);
  report["ub"] = round12(a.homogeneous.ub);
  report["lb_cs"] = a.restricted ? json(round12(a.restricted->lb)) : json(nullptr);
  report["ub_cs"] = a.restricted ? json(round12(a.restricted->ub)) : json(nullptr);
  report["lb_inhom"] = round12(a.inhomogeneous.lb);
  report["ub_inhom"] = round12(a.inhomogeneous.ub);
  report["ewac_I"] = round12(a.ewac_independence);
  report["ewac_P"] = round12(a.ewac_comonotonic);
  report["ewac_N"] = round12(a.ewac_countermonotonic);
  report["naive"] = round12(a.naive);
  report["theta_lb"] = matrix_json(a.homogeneous.theta_lb);
  report["theta_ub"] = matrix_json(a.homogeneous.theta_ub);
  return report.dump(2) + "\n";
}

std::string cmd_sweep_eta(const ExperimentConfig& cfg) {
  const ObservationPath obs = resolve_path(cfg.path, 6);
  const std::vector<double> grid = cfg.eta_grid.empty() ? default_eta_grid() : cfg.eta_grid;
  EtaSweepOptions options;
  options.restriction = cfg.constraints;
  std::ostringstream os;
  os << kEtaSweepHeader << '\n';
  for (const SweepRow& r : eta_sweep(obs, grid, options)) {
    os << format_number(r.grid) << ',' << optional_field(r.lb) << ',' << optional_field(r.ub) << ','
       << optional_field(r.lb_cs) << ',' << optional_field(r.ub_cs) << ','
       << optional_field(r.lb_inhom) << ',' << optional_field(r.ub_inhom) << ','
       << optional_field(r.ewac_I) << ',' << optional_field(r.ewac_P) << ','
       << optional_field(r.ewac_N) << ',' << optional_field(r.naive) << '\n';
  }
  return os.str();
}

std::string cmd_sweep_horizon(const ExperimentConfig& cfg) {
  if (cfg.model) throw InvalidInput("sweep-horizon uses the canonical model; give --eta");
  std::vector<Eigen::Index> grid;
  if (cfg.horizon_grid.empty()) {
    grid = default_horizon_grid();
  } else {
    grid.assign(cfg.horizon_grid.begin(), cfg.horizon_grid.end());
  }
  std::ostringstream os;
  os << kHorizonSweepHeader << '\n';
  for (const SweepRow& r : horizon_sweep(cfg.eta.value_or(0.5), grid, cfg.seed)) {
    os << static_cast<long long>(r.grid) << ',' << optional_field(r.lb) << ','
       << optional_field(r.ub) << ',' << optional_field(r.naive) << ','
       << optional_field(r.limit) << '\n';
  }
  return os.str();
}

std::string cmd_wac_dist(const ExperimentConfig& cfg) {
  const HmmModel model = resolve_model(cfg);
  const ObservationPath obs = resolve_path(cfg.path, model.num_symbols());
  std::vector<std::string> kinds = cfg.thetas;
  if (kinds.empty()) kinds = {"ub", "lb", "independence", "comonotonic", "countermonotonic"};

  std::optional<EwacBounds> optimisers;
  std::ostringstream os;
  os << kWacHeader << '\n';
  for (const std::string& kind : kinds) {
    JointPmf theta;
    if (kind == "lb" || kind == "ub") {
      if (!optimisers) optimisers = bounds(build_objective(model, obs), model, ConstraintSet::none);
      theta = kind == "lb" ? optimisers->theta_lb : optimisers->theta_ub;
    } else {
      theta = copula_pmf(model, parse_copula_kind(kind));
    }
    const auto samples = sample_wac(model, obs, theta, cfg.samples, cfg.seed);
    for (std::size_t s = 0; s < samples.size(); ++s) {
      os << kind << ',' << s + 1 << ',' << format_number(samples[s].wac) << '\n';
    }
  }
  return os.str();
}

std::string cmd_copulas(const ExperimentConfig& cfg) {
  const HmmModel model = resolve_model(cfg);
  json report;
  for (CopulaKind kind : {CopulaKind::independence, CopulaKind::comonotonic,
                          CopulaKind::countermonotonic}) {
    report[std::string(to_string(kind))] = matrix_json(copula_pmf(model, kind));
  }
  return report.dump(2) + "\n";
}

}  // namespace

std::string format_number(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.12g", value == 0.0 ? 0.0 : value);
  return buffer;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bounds on the expected winnings attributable to cheating in the dishonest casino HMM",
               "ewac"};
  app.require_subcommand(1);

  Overrides o;
  using Command = std::function<std::string(const ExperimentConfig&)>;
  std::vector<std::pair<CLI::App*, Command>> commands;
  auto add = [&](const char* name, const char* help, Command fn) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common_flags(sub, o);
    commands.emplace_back(sub, std::move(fn));
    return sub;
  };

  add("smooth", "posterior state marginals as CSV", cmd_smooth);
  add("bounds", "EWAC bounds and benchmarks as JSON", cmd_bounds);
  CLI::App* sweep_eta = add("sweep-eta", "bounds over a grid of eta (CSV)", cmd_sweep_eta);
  sweep_eta->add_option("--eta-grid", o.eta_grid, "eta values")->delimiter(',');
  CLI::App* sweep_horizon =
      add("sweep-horizon", "time-averaged bounds over growing horizons (CSV)", cmd_sweep_horizon);
  sweep_horizon->add_option("--horizons", o.horizons, "horizon lengths")->delimiter(',');
  CLI::App* wac = add("wac-dist", "Monte-Carlo WAC samples (CSV)", cmd_wac_dist);
  wac->add_option("--theta", o.thetas, "lb, ub, independence, comonotonic, countermonotonic")
      ->delimiter(',');
  add("copulas", "benchmark joint PMFs as JSON", cmd_copulas);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kParseError;
  }

  try {
    for (auto& [sub, fn] : commands) {
      if (!sub->parsed()) continue;
      const ExperimentConfig cfg = effective_config(o, *sub);
      emit(cfg, out, fn(cfg));
    }
  } catch (const InfeasibleMask& e) {
    err << "error: " << e.what() << '\n';
    return kInfeasible;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return kParseError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  }
  return kSuccess;
}

}  // namespace ewac::cli
