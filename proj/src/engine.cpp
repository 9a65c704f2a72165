#include "ewac/engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ewac/errors.hpp"

namespace ewac {

namespace {

constexpr double kUniformTol = 1e-12;

std::string describe(const ZeroMask& mask) {
  std::string out = "{";
  bool first = true;
  for (const auto& [i, j] : mask.cells()) {
    if (!first) out += ",";
    out += "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
    first = false;
  }
  return out + "}";
}

Eigen::VectorXd cumulative(const Eigen::VectorXd& pmf) {
  Eigen::VectorXd cdf(pmf.size() + 1);
  cdf[0] = 0.0;
  for (Eigen::Index i = 0; i < pmf.size(); ++i) cdf[i + 1] = cdf[i] + pmf[i];
  cdf[pmf.size()] = 1.0;
  return cdf;
}

// theta(i,j) = C(i,j) - C(i-1,j) - C(i,j-1) + C(i-1,j-1) for a joint CDF
// C evaluated on the marginal CDF grid (index 0 is the empty event).
template <typename JointCdf>
JointPmf rectangle_masses(const Eigen::VectorXd& fair_cdf,
                          const Eigen::VectorXd& biased_cdf, JointCdf cdf) {
  const Eigen::Index K = fair_cdf.size() - 1;
  JointPmf theta(K, biased_cdf.size() - 1);
  for (Eigen::Index i = 1; i <= K; ++i) {
    for (Eigen::Index j = 1; j < biased_cdf.size(); ++j) {
      const double mass = cdf(fair_cdf[i], biased_cdf[j]) - cdf(fair_cdf[i - 1], biased_cdf[j]) -
                          cdf(fair_cdf[i], biased_cdf[j - 1]) +
                          cdf(fair_cdf[i - 1], biased_cdf[j - 1]);
      theta(i - 1, j - 1) = std::max(mass, 0.0);
    }
  }
  return theta;
}

}  // namespace

std::string_view to_string(ConstraintSet c) {
  switch (c) {
    case ConstraintSet::none: return "none";
    case ConstraintSet::pm: return "pm";
    case ConstraintSet::cs: return "cs";
  }
  return "none";
}

std::string_view to_string(CopulaKind k) {
  switch (k) {
    case CopulaKind::independence: return "independence";
    case CopulaKind::comonotonic: return "comonotonic";
    case CopulaKind::countermonotonic: return "countermonotonic";
  }
  return "independence";
}

ConstraintSet parse_constraint_set(std::string_view text) {
  if (text == "none") return ConstraintSet::none;
  if (text == "pm") return ConstraintSet::pm;
  if (text == "cs") return ConstraintSet::cs;
  throw InvalidInput("unknown constraint set '" + std::string(text) + "' (expected none, pm or cs)");
}

CopulaKind parse_copula_kind(std::string_view text) {
  if (text == "independence") return CopulaKind::independence;
  if (text == "comonotonic") return CopulaKind::comonotonic;
  if (text == "countermonotonic") return CopulaKind::countermonotonic;
  throw InvalidInput("unknown copula '" + std::string(text) + "'");
}

EwacObjective build_objective(const HmmModel& model, const ObservationPath& obs,
                              const SmoothedPosterior& posterior) {
  check_compatible(model, obs);
  if (posterior.size() != obs.size()) {
    throw InvalidInput("posterior length does not match the observation path");
  }
  const Eigen::Index K = model.num_symbols();
  const auto& w = model.reward();

  EwacObjective obj;
  obj.fair_marginal = model.fair_emission();
  obj.biased_marginal = model.biased_emission();
  obj.horizon = obs.size();

  Eigen::VectorXd biased_mass = Eigen::VectorXd::Zero(K);
  Eigen::VectorXi seen = Eigen::VectorXi::Zero(K);
  for (Eigen::Index t = 0; t < obs.size(); ++t) {
    const int o = obs[t];
    obj.w_obs += w[o];
    obj.fair_term += posterior.fair(t) * w[o];
    biased_mass[o] += posterior.biased(t);
    seen[o] = 1;
  }

  obj.coeff = Eigen::MatrixXd::Zero(K, K);
  for (Eigen::Index j = 0; j < K; ++j) {
    if (!seen[j]) continue;
    const double eb = obj.biased_marginal[j];
    if (!(eb > 0.0)) {
      throw InvalidInput("symbol " + std::to_string(j + 1) +
                         " is observed but has zero emission probability under the loaded die");
    }
    obj.coeff.col(j) = w * (biased_mass[j] / eb);
  }
  return obj;
}

EwacObjective build_objective(const HmmModel& model, const ObservationPath& obs) {
  return build_objective(model, obs, smooth(model, obs));
}

bool in_feasible_set(const Eigen::VectorXd& fair_marginal,
                     const Eigen::VectorXd& biased_marginal, const JointPmf& theta,
                     double tol) {
  if (theta.rows() != fair_marginal.size() || theta.cols() != biased_marginal.size()) return false;
  if (!theta.allFinite() || theta.minCoeff() < -tol) return false;
  return (theta.rowwise().sum() - fair_marginal).cwiseAbs().maxCoeff() <= tol &&
         (theta.colwise().sum().transpose() - biased_marginal).cwiseAbs().maxCoeff() <= tol;
}

double ewac_of_theta(const EwacObjective& objective, const JointPmf& theta) {
  if (!in_feasible_set(objective.fair_marginal, objective.biased_marginal, theta)) {
    throw InvalidInput("theta is not a joint PMF with the emission marginals");
  }
  return objective.w_obs - objective.fair_term - objective.coeff.cwiseProduct(theta).sum();
}

EwacBounds bounds(const EwacObjective& objective, const HmmModel& model,
                  const ZeroMask& zero_mask, ConstraintSet tag) {
  if (objective.coeff.rows() != model.num_symbols() ||
      !objective.fair_marginal.isApprox(model.fair_emission()) ||
      !objective.biased_marginal.isApprox(model.biased_emission())) {
    throw InvalidInput("objective was built from a different model");
  }
  const double offset = objective.w_obs - objective.fair_term;

  // EWAC is decreasing in <coeff, theta>: the lower bound maximises it.
  TransportProblem<double> problem(objective.coeff, objective.fair_marginal,
                                   objective.biased_marginal, zero_mask, Sense::maximize);
  const LpSolution<double> hi = solve(problem);
  if (hi.status != LpStatus::optimal) {
    throw InfeasibleMask("zero mask " + describe(zero_mask) +
                         " leaves no joint PMF with the emission marginals");
  }
  problem.sense = Sense::minimize;
  const LpSolution<double> lo = solve(problem);
  if (lo.status != LpStatus::optimal) {
    throw NumericalFailure("transport LP: minimisation infeasible after a feasible maximisation");
  }

  EwacBounds out;
  out.lb = offset - hi.value;
  out.ub = offset - lo.value;
  out.theta_lb = hi.theta;
  out.theta_ub = lo.theta;
  out.constraint = tag;
  out.iterations = hi.iterations + lo.iterations;
  return out;
}

EwacBounds bounds(const EwacObjective& objective, const HmmModel& model,
                  ConstraintSet constraint) {
  return bounds(objective, model, constraint_mask(model, constraint), constraint);
}

ZeroMask pm_mask(Eigen::Index num_symbols) {
  if (num_symbols < 1) throw InvalidInput("pm_mask: need at least one symbol");
  std::vector<ZeroMask::Cell> cells;
  for (Eigen::Index i = 0; i < num_symbols; ++i)
    for (Eigen::Index j = 0; j < i; ++j) cells.emplace_back(i, j);
  return ZeroMask(cells);
}

ZeroMask cs_mask(const Eigen::MatrixXd& emission) {
  if (emission.rows() != 2) throw InvalidInput("cs_mask: emission matrix must have two rows");
  const Eigen::Index K = emission.cols();
  const Eigen::RowVectorXd fair = emission.row(kFair);
  if ((fair.array() - 1.0 / static_cast<double>(K)).abs().maxCoeff() > kUniformTol) {
    throw InvalidInput("cs_mask: counterfactual-stability cells are derived for a uniform fair die");
  }
  const Eigen::RowVectorXd biased = emission.row(kBiased);
  std::vector<ZeroMask::Cell> cells;
  for (Eigen::Index i = 0; i < K; ++i)
    for (Eigen::Index j = 0; j < K; ++j)
      if (i != j && biased[j] <= biased[i]) cells.emplace_back(i, j);
  return ZeroMask(cells);
}

ZeroMask constraint_mask(const HmmModel& model, ConstraintSet constraint) {
  switch (constraint) {
    case ConstraintSet::none: return ZeroMask{};
    case ConstraintSet::pm: return pm_mask(model.num_symbols());
    case ConstraintSet::cs: return cs_mask(model.emission());
  }
  return ZeroMask{};
}

Eigen::VectorXd inhomogeneous_column(const HmmModel& model, Eigen::Index symbol,
                                     BoundSide side) {
  const Eigen::Index K = model.num_symbols();
  if (symbol < 0 || symbol >= K) throw InvalidInput("inhomogeneous_column: symbol out of range");
  const Eigen::VectorXd fair = model.fair_emission();
  double remaining = model.emission()(kBiased, symbol);
  Eigen::VectorXd column = Eigen::VectorXd::Zero(K);
  for (Eigen::Index step = 0; step < K; ++step) {
    const Eigen::Index i = side == BoundSide::lower ? K - 1 - step : step;
    column[i] = std::min(fair[i], remaining);
    remaining -= column[i];
  }
  return column;
}

InhomogeneousBounds inhomogeneous_bounds(const EwacObjective& objective,
                                         const HmmModel& model) {
  const Eigen::Index K = model.num_symbols();
  if (objective.coeff.rows() != K) throw InvalidInput("objective was built from a different model");
  const Eigen::VectorXd fair = model.fair_emission();
  const Eigen::VectorXd biased = model.biased_emission();
  const double offset = objective.w_obs - objective.fair_term;

  auto assemble = [&](BoundSide side, std::vector<JointPmf>& thetas) {
    double total = 0.0;
    thetas.clear();
    for (Eigen::Index j = 0; j < K; ++j) {
      const Eigen::VectorXd column = inhomogeneous_column(model, j, side);
      total += objective.coeff.col(j).dot(column);

      Eigen::VectorXd rows_left = (fair - column).cwiseMax(0.0);
      Eigen::VectorXd cols_left = biased;
      cols_left[j] = 0.0;
      JointPmf theta = north_west_corner<double>(rows_left, cols_left);
      theta.col(j) = column;
      thetas.push_back(std::move(theta));
    }
    return total;
  };

  InhomogeneousBounds out;
  out.lb = offset - assemble(BoundSide::lower, out.theta_lb_by_symbol);
  out.ub = offset - assemble(BoundSide::upper, out.theta_ub_by_symbol);
  return out;
}

JointPmf copula_pmf(const HmmModel& model, CopulaKind kind) {
  const Eigen::VectorXd fair = model.fair_emission();
  const Eigen::VectorXd biased = model.biased_emission();
  switch (kind) {
    case CopulaKind::independence:
      return fair * biased.transpose();
    case CopulaKind::comonotonic:
      return rectangle_masses(cumulative(fair), cumulative(biased),
                              [](double u, double v) { return std::min(u, v); });
    case CopulaKind::countermonotonic:
      return rectangle_masses(cumulative(fair), cumulative(biased),
                              [](double u, double v) { return std::max(u + v - 1.0, 0.0); });
  }
  throw InvalidInput("unknown copula kind");
}

double naive_ewac(const HmmModel& model, const ObservationPath& obs) {
  check_compatible(model, obs);
  double w_obs = 0.0;
  for (int o : obs.symbols()) w_obs += model.reward()[o];
  const double fair_mean = model.fair_emission().dot(model.reward());
  return w_obs - static_cast<double>(obs.size()) * fair_mean;
}

Eigen::Vector2d stationary(const HmmModel& model) {
  const auto& Q = model.transition();
  const double leave_fair = Q(kFair, kBiased);
  const double leave_biased = Q(kBiased, kFair);
  const double rate = leave_fair + leave_biased;
  if (!(rate > 0.0)) {
    throw InvalidInput("hidden chain is reducible (identity transition matrix); "
                       "stationary distribution is not unique");
  }
  return Eigen::Vector2d(leave_biased / rate, leave_fair / rate);
}

double asymptotic_ewac_rate(const HmmModel& model) {
  const Eigen::Vector2d pi = stationary(model);
  const auto& w = model.reward();
  return pi[kBiased] * (model.biased_emission().dot(w) - model.fair_emission().dot(w));
}

}  // namespace ewac
