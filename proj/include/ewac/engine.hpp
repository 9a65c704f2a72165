#ifndef EWAC_ENGINE_HPP
#define EWAC_ENGINE_HPP

#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ewac/hmm.hpp"
#include "ewac/transport_lp.hpp"

namespace ewac {

/// Joint PMF theta(i, j) = P(fair-die roll = i, loaded-die roll = j). Rows are
/// indexed by the fair-die symbol, columns by the loaded-die symbol.
using JointPmf = Eigen::MatrixXd;

enum class ConstraintSet { none, pm, cs };
enum class CopulaKind { independence, comonotonic, countermonotonic };
enum class BoundSide { lower, upper };

std::string_view to_string(ConstraintSet c);
std::string_view to_string(CopulaKind k);
ConstraintSet parse_constraint_set(std::string_view text);
CopulaKind parse_copula_kind(std::string_view text);

/// EWAC as an affine function of theta:
///
///   EWAC(theta) = w_obs - fair_term - sum_{i,j} coeff(i,j) theta(i,j)
///
/// with coeff(i,j) = w_i / e_bj * sum_{t : o_t = j} delta_t(b). The per-period
/// sum is aggregated by observed symbol, which is exact because theta enters
/// period t only through column o_t.
struct EwacObjective {
  double w_obs = 0.0;
  double fair_term = 0.0;
  Eigen::MatrixXd coeff;
  Eigen::VectorXd fair_marginal;
  Eigen::VectorXd biased_marginal;
  Eigen::Index horizon = 0;
};

struct EwacBounds {
  double lb = 0.0;
  double ub = 0.0;
  JointPmf theta_lb;
  JointPmf theta_ub;
  ConstraintSet constraint = ConstraintSet::none;
  int iterations = 0;
};

/// Bounds when theta may vary with t. The optimum only depends on the observed
/// symbol, so one matrix per symbol is reported; cells outside the optimised
/// column are a north-west-corner completion and are not unique.
struct InhomogeneousBounds {
  double lb = 0.0;
  double ub = 0.0;
  std::vector<JointPmf> theta_lb_by_symbol;
  std::vector<JointPmf> theta_ub_by_symbol;
};

EwacObjective build_objective(const HmmModel& model, const ObservationPath& obs,
                              const SmoothedPosterior& posterior);

/// Convenience overload that smooths first.
EwacObjective build_objective(const HmmModel& model, const ObservationPath& obs);

/// True when theta is nonnegative with the objective's marginals (within tol).
bool in_feasible_set(const Eigen::VectorXd& fair_marginal,
                     const Eigen::VectorXd& biased_marginal, const JointPmf& theta,
                     double tol = 1e-9);

double ewac_of_theta(const EwacObjective& objective, const JointPmf& theta);

EwacBounds bounds(const EwacObjective& objective, const HmmModel& model,
                  const ZeroMask& zero_mask,
                  ConstraintSet tag = ConstraintSet::none);
EwacBounds bounds(const EwacObjective& objective, const HmmModel& model,
                  ConstraintSet constraint);

/// theta(i, j) = 0 for j < i.
ZeroMask pm_mask(Eigen::Index num_symbols);

/// theta(i, j) = 0 for i != j with e_bj <= e_bi. Requires a uniform fair row.
ZeroMask cs_mask(const Eigen::MatrixXd& emission);

ZeroMask constraint_mask(const HmmModel& model, ConstraintSet constraint);

/// Greedy optimal column `symbol` of a single-period theta. The lower EWAC
/// bound puts as much mass as possible on high-reward rows (filling from the
/// last row up); the upper bound fills from the first row down.
Eigen::VectorXd inhomogeneous_column(const HmmModel& model, Eigen::Index symbol,
                                     BoundSide side);

InhomogeneousBounds inhomogeneous_bounds(const EwacObjective& objective,
                                         const HmmModel& model);

JointPmf copula_pmf(const HmmModel& model, CopulaKind kind);

/// Observed winnings minus the unconditional expectation of T fair rolls.
double naive_ewac(const HmmModel& model, const ObservationPath& obs);

/// Stationary distribution of the hidden chain; throws when it is not unique.
Eigen::Vector2d stationary(const HmmModel& model);

/// Almost-sure limit of EWAC / T as T grows:
/// pi_b * (E_b[w] - E_f[w]).
double asymptotic_ewac_rate(const HmmModel& model);

}  // namespace ewac

#endif  // EWAC_ENGINE_HPP
