#include "ewac/scenario.hpp"

#include <algorithm>
#include <string>

#include "ewac/errors.hpp"
#include "ewac/rng.hpp"

namespace ewac {

std::vector<WacSample> sample_wac(const HmmModel& model, const ObservationPath& obs,
                                  const JointPmf& theta, int count, std::uint64_t seed) {
  check_compatible(model, obs);
  if (!in_feasible_set(model.fair_emission(), model.biased_emission(), theta)) {
    throw InvalidInput("sample_wac: theta is not a joint PMF with the emission marginals");
  }
  const std::vector<HiddenPath> hidden = sample_hidden_paths(model, obs, count, seed);
  const auto& w = model.reward();
  double w_obs = 0.0;
  for (int o : obs.symbols()) w_obs += w[o];

  std::vector<WacSample> out;
  out.reserve(hidden.size());
  for (std::size_t s = 0; s < hidden.size(); ++s) {
    Rng rng = make_rng(~seed, s);
    std::vector<int> counterfactual(obs.symbols());
    double w_cf = 0.0;
    for (Eigen::Index t = 0; t < obs.size(); ++t) {
      if (hidden[s][static_cast<std::size_t>(t)] == HiddenState::biased) {
        const auto column = theta.col(obs[t]);
        if (!(column.sum() > 0.0)) {
          throw NumericalFailure("sample_wac: loaded state sampled at position " +
                                 std::to_string(t + 1) + " where the loaded die cannot emit " +
                                 std::to_string(obs[t] + 1));
        }
        counterfactual[static_cast<std::size_t>(t)] = static_cast<int>(sample_categorical(column, rng));
      }
      w_cf += w[counterfactual[static_cast<std::size_t>(t)]];
    }
    out.push_back({w_obs - w_cf, hidden[s], ObservationPath(std::move(counterfactual), obs.num_symbols())});
  }
  return out;
}

PointAnalysis analyze(const HmmModel& model, const ObservationPath& obs,
                      ConstraintSet restriction) {
  const EwacObjective objective = build_objective(model, obs);
  PointAnalysis out;
  out.homogeneous = bounds(objective, model, ConstraintSet::none);
  if (restriction != ConstraintSet::none) out.restricted = bounds(objective, model, restriction);
  out.inhomogeneous = inhomogeneous_bounds(objective, model);
  out.ewac_independence = ewac_of_theta(objective, copula_pmf(model, CopulaKind::independence));
  out.ewac_comonotonic = ewac_of_theta(objective, copula_pmf(model, CopulaKind::comonotonic));
  out.ewac_countermonotonic =
      ewac_of_theta(objective, copula_pmf(model, CopulaKind::countermonotonic));
  out.naive = naive_ewac(model, obs);
  return out;
}

std::vector<double> default_eta_grid() {
  std::vector<double> grid;
  for (int k = 1; k <= 99; ++k) grid.push_back(k / 100.0);
  return grid;
}

std::vector<SweepRow> eta_sweep(const ObservationPath& path, const std::vector<double>& eta_grid,
                                const EtaSweepOptions& options) {
  std::vector<SweepRow> rows;
  rows.reserve(eta_grid.size());
  for (double eta : eta_grid) {
    const HmmModel model = build_canonical_model(eta);
    const EwacObjective objective = build_objective(model, path);

    SweepRow row;
    row.grid = eta;
    const EwacBounds plain = bounds(objective, model, ConstraintSet::none);
    row.lb = plain.lb;
    row.ub = plain.ub;
    if (options.restriction != ConstraintSet::none) {
      const EwacBounds restricted = bounds(objective, model, options.restriction);
      row.lb_cs = restricted.lb;
      row.ub_cs = restricted.ub;
    }
    if (options.inhomogeneous) {
      const InhomogeneousBounds inhom = inhomogeneous_bounds(objective, model);
      row.lb_inhom = inhom.lb;
      row.ub_inhom = inhom.ub;
    }
    if (options.copulas) {
      row.ewac_I = ewac_of_theta(objective, copula_pmf(model, CopulaKind::independence));
      row.ewac_P = ewac_of_theta(objective, copula_pmf(model, CopulaKind::comonotonic));
      row.ewac_N = ewac_of_theta(objective, copula_pmf(model, CopulaKind::countermonotonic));
    }
    row.naive = naive_ewac(model, path);
    rows.push_back(row);
  }
  return rows;
}

std::vector<Eigen::Index> default_horizon_grid(Eigen::Index max_horizon) {
  std::vector<Eigen::Index> grid;
  for (Eigen::Index decade = 10; decade <= max_horizon; decade *= 10) {
    for (Eigen::Index m : {1, 2, 5}) {
      if (decade * m <= max_horizon) grid.push_back(decade * m);
    }
  }
  if (grid.empty() || grid.back() != max_horizon) grid.push_back(max_horizon);
  return grid;
}

std::vector<SweepRow> horizon_sweep(double eta, const std::vector<Eigen::Index>& horizon_grid,
                                    std::uint64_t seed) {
  if (horizon_grid.empty()) throw InvalidInput("horizon grid is empty");
  for (std::size_t k = 0; k < horizon_grid.size(); ++k) {
    if (horizon_grid[k] < 1 || (k > 0 && horizon_grid[k] <= horizon_grid[k - 1])) {
      throw InvalidInput("horizon grid must be positive and strictly increasing");
    }
  }
  const HmmModel model = build_canonical_model(eta);
  const SimulatedRun run = simulate(model, horizon_grid.back(), seed);
  const double limit = asymptotic_ewac_rate(model);

  std::vector<SweepRow> rows;
  for (Eigen::Index T : horizon_grid) {
    const ObservationPath prefix = run.observations.prefix(T);
    const EwacObjective objective = build_objective(model, prefix);
    const EwacBounds b = bounds(objective, model, ConstraintSet::none);
    const auto scale = static_cast<double>(T);

    SweepRow row;
    row.grid = scale;
    row.lb = b.lb / scale;
    row.ub = b.ub / scale;
    row.naive = naive_ewac(model, prefix) / scale;
    row.limit = limit;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ewac
