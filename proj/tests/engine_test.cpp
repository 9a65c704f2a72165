#include <doctest.h>

#include <random>
#include <string>

#include "ewac/config.hpp"
#include "ewac/engine.hpp"
#include "ewac/errors.hpp"
#include "oracles.hpp"

using namespace ewac;

namespace {

HmmModel with_biased_row(const Eigen::RowVectorXd& biased) {
  const HmmModel base = build_canonical_model(0.5);
  Eigen::MatrixXd e = base.emission();
  e.row(kBiased) = biased;
  return HmmModel(base.initial(), base.transition(), e, base.reward());
}

double path_total(const ObservationPath& obs) {
  double s = 0.0;
  for (int v : obs.one_based()) s += v;
  return s;
}

}  // namespace

TEST_CASE("objective for a single six") {
  const HmmModel model = build_canonical_model(0.5);
  const auto obs = ObservationPath::from_one_based({6}, 6);
  const EwacObjective obj = build_objective(model, obs);
  CHECK(obj.w_obs == 6.0);
  CHECK(obj.fair_term == doctest::Approx(6.0 * 7.0 / 19.0).epsilon(1e-14));
  for (int i = 0; i < 6; ++i) {
    CHECK(obj.coeff(i, 5) == doctest::Approx((i + 1) * (12.0 / 19.0) / (6.0 / 21.0)).epsilon(1e-13));
    CHECK(obj.coeff.row(i).head(5).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("objective rejects symbols the loaded die cannot emit") {
  Eigen::RowVectorXd biased(6);
  biased << 0.0, 0.2, 0.2, 0.2, 0.2, 0.2;
  const HmmModel model = with_biased_row(biased);
  CHECK_THROWS_AS(build_objective(model, ObservationPath::from_one_based({2, 1}, 6)), InvalidInput);
  CHECK_NOTHROW(build_objective(model, ObservationPath::from_one_based({2, 3}, 6)));
}

TEST_CASE("fully fair model attributes nothing to cheating") {
  const HmmModel model = build_canonical_model(1.0);
  std::mt19937_64 rng(11);
  for (int p : {1, 2}) {
    const ObservationPath obs = builtin_path(p);
    const EwacObjective obj = build_objective(model, obs);
    const EwacBounds b = bounds(obj, model, ConstraintSet::none);
    CHECK(b.lb == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    CHECK(b.ub == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    for (int k = 0; k < 20; ++k) {
      const JointPmf theta = oracle::random_coupling(rng, obj.fair_marginal, obj.biased_marginal);
      CHECK(std::abs(ewac_of_theta(obj, theta)) < 1e-9);
    }
  }
}

TEST_CASE("always loaded with independent dice") {
  const HmmModel model = build_canonical_model(0.0);
  for (int p : {1, 2}) {
    const ObservationPath obs = builtin_path(p);
    const EwacObjective obj = build_objective(model, obs);
    const double expected = path_total(obs) - 3.5 * static_cast<double>(obs.size());
    CHECK(ewac_of_theta(obj, copula_pmf(model, CopulaKind::independence)) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK(path_total(builtin_path(2)) - 105.0 == 20.0);
  CHECK(path_total(builtin_path(1)) - 105.0 == 0.0);
}

TEST_CASE("constraint masks") {
  const ZeroMask pm = pm_mask(6);
  CHECK(pm.size() == 15);
  CHECK(pm.contains(5, 0));
  CHECK_FALSE(pm.contains(0, 5));

  const HmmModel canonical = build_canonical_model(0.5);
  CHECK(cs_mask(canonical.emission()) == pm);

  const HmmModel flat = with_biased_row(Eigen::RowVectorXd::Constant(6, 1.0 / 6.0));
  const ZeroMask all_off_diagonal = cs_mask(flat.emission());
  CHECK(all_off_diagonal.size() == 30);
  for (Eigen::Index i = 0; i < 6; ++i) CHECK_FALSE(all_off_diagonal.contains(i, i));

  Eigen::RowVectorXd decreasing = Eigen::RowVectorXd::LinSpaced(6, 6.0, 1.0) / 21.0;
  const ZeroMask reversed = cs_mask(with_biased_row(decreasing).emission());
  CHECK(reversed.size() == 15);
  for (Eigen::Index i = 0; i < 6; ++i)
    for (Eigen::Index j = 0; j < 6; ++j) CHECK(reversed.contains(i, j) == (i < j));
  CHECK_FALSE(reversed == pm);

  Eigen::MatrixXd skewed = canonical.emission();
  skewed.row(kFair) = decreasing;
  CHECK_THROWS_AS(cs_mask(skewed), InvalidInput);
}

TEST_CASE("masks that admit no coupling are reported") {
  const HmmModel model = build_canonical_model(0.5);
  const EwacObjective obj = build_objective(model, builtin_path(1));
  std::vector<ZeroMask::Cell> cells;
  for (Eigen::Index j = 0; j < 6; ++j) cells.emplace_back(0, j);
  try {
    bounds(obj, model, ZeroMask(cells));
    FAIL("expected InfeasibleMask");
  } catch (const InfeasibleMask& e) {
    CHECK(std::string(e.what()).find("(1,6)") != std::string::npos);
  }
}

TEST_CASE("greedy single-period columns") {
  const HmmModel model = build_canonical_model(0.5);
  const Eigen::VectorXd lower1 = inhomogeneous_column(model, 0, BoundSide::lower);
  CHECK(lower1[5] == doctest::Approx(1.0 / 21.0).epsilon(1e-15));
  CHECK(lower1.head(5).cwiseAbs().maxCoeff() == 0.0);

  const Eigen::VectorXd lower4 = inhomogeneous_column(model, 3, BoundSide::lower);
  CHECK(lower4[5] == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(lower4[4] == doctest::Approx(1.0 / 42.0).epsilon(1e-13));
  CHECK(lower4.head(4).cwiseAbs().maxCoeff() == 0.0);

  const Eigen::VectorXd upper6 = inhomogeneous_column(model, 5, BoundSide::upper);
  CHECK(upper6[0] == doctest::Approx(1.0 / 6.0));
  CHECK(upper6.sum() == doctest::Approx(6.0 / 21.0).epsilon(1e-14));
  CHECK(upper6[1] == doctest::Approx(6.0 / 21.0 - 1.0 / 6.0).epsilon(1e-13));
}

TEST_CASE("greedy columns solve the single-period LP") {
  for (double eta : {0.2, 0.5, 0.8}) {
    const HmmModel model = build_canonical_model(eta);
    for (Eigen::Index j = 0; j < 6; ++j) {
      Eigen::MatrixXd c = Eigen::MatrixXd::Zero(6, 6);
      c.col(j) = model.reward();
      for (BoundSide side : {BoundSide::lower, BoundSide::upper}) {
        const Sense sense = side == BoundSide::lower ? Sense::maximize : Sense::minimize;
        const auto lp = solve(TransportProblem<double>(c, model.fair_emission(),
                                                       model.biased_emission(), {}, sense));
        REQUIRE(lp.status == LpStatus::optimal);
        const Eigen::VectorXd greedy = inhomogeneous_column(model, j, side);
        CHECK(model.reward().dot(greedy) == doctest::Approx(lp.value).epsilon(1e-9));
        CHECK((greedy - lp.theta.col(j)).cwiseAbs().maxCoeff() < 1e-9);
      }
    }
  }
}

TEST_CASE("inhomogeneous witnesses are feasible and reproduce the bounds") {
  const HmmModel model = build_canonical_model(0.3);
  const ObservationPath obs = builtin_path(2);
  const EwacObjective obj = build_objective(model, obs);
  const InhomogeneousBounds inhom = inhomogeneous_bounds(obj, model);
  const EwacBounds hom = bounds(obj, model, ConstraintSet::none);
  CHECK(inhom.lb <= hom.lb + 1e-8);
  CHECK(hom.ub <= inhom.ub + 1e-8);

  double lower_sum = obj.w_obs - obj.fair_term;
  double upper_sum = lower_sum;
  for (Eigen::Index j = 0; j < 6; ++j) {
    CHECK(in_feasible_set(obj.fair_marginal, obj.biased_marginal, inhom.theta_lb_by_symbol[j]));
    CHECK(in_feasible_set(obj.fair_marginal, obj.biased_marginal, inhom.theta_ub_by_symbol[j]));
    lower_sum -= obj.coeff.col(j).dot(inhom.theta_lb_by_symbol[j].col(j));
    upper_sum -= obj.coeff.col(j).dot(inhom.theta_ub_by_symbol[j].col(j));
  }
  CHECK(lower_sum == doctest::Approx(inhom.lb).epsilon(1e-12));
  CHECK(upper_sum == doctest::Approx(inhom.ub).epsilon(1e-12));
}

TEST_CASE("benchmark copulas") {
  const HmmModel model = build_canonical_model(0.5);
  const Eigen::VectorXd f = model.fair_emission();
  const Eigen::VectorXd b = model.biased_emission();
  const JointPmf ind = copula_pmf(model, CopulaKind::independence);
  const JointPmf co = copula_pmf(model, CopulaKind::comonotonic);
  const JointPmf counter = copula_pmf(model, CopulaKind::countermonotonic);
  CHECK(ind(2, 4) == doctest::Approx(5.0 / 126.0).epsilon(1e-14));
  CHECK(co(0, 0) == doctest::Approx(1.0 / 21.0).epsilon(1e-12));
  CHECK(counter(0, 5) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  for (const JointPmf* theta : {&ind, &co, &counter}) {
    CHECK(in_feasible_set(f, b, *theta, 1e-12));
  }
  const ZeroMask pm = pm_mask(6);
  for (const auto& [i, j] : pm.cells()) CHECK(co(i, j) == 0.0);
  // Countermonotone mass lies on the anti-diagonal band: no cell with both
  // rolls high.
  CHECK(counter(5, 5) == 0.0);
}

TEST_CASE("copulas on a random model keep their marginals") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 20; ++k) {
    const HmmModel model = oracle::random_model(rng, 2 + k % 5);
    for (CopulaKind kind : {CopulaKind::independence, CopulaKind::comonotonic,
                            CopulaKind::countermonotonic}) {
      CHECK(in_feasible_set(model.fair_emission(), model.biased_emission(), copula_pmf(model, kind)));
    }
  }
}

TEST_CASE("naive estimate") {
  const HmmModel model = build_canonical_model(0.5);
  CHECK(naive_ewac(model, builtin_path(1)) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(naive_ewac(model, builtin_path(2)) == doctest::Approx(20.0).epsilon(1e-12));
  // Independent of the hidden-chain parameters.
  CHECK(naive_ewac(build_canonical_model(0.1), builtin_path(2)) ==
        naive_ewac(build_canonical_model(0.9), builtin_path(2)));
}

TEST_CASE("stationary distribution and long-run rate") {
  const HmmModel base = build_canonical_model(0.5);
  Eigen::Matrix2d flip;
  flip << 0, 1,
          1, 0;
  const HmmModel flipping(base.initial(), flip, base.emission(), base.reward());
  CHECK(stationary(flipping).isApprox(Eigen::Vector2d(0.5, 0.5)));

  Eigen::Matrix2d q;
  q << 0.9, 0.1,
       0.3, 0.7;
  const HmmModel sticky(base.initial(), q, base.emission(), base.reward());
  const Eigen::Vector2d pi = stationary(sticky);
  CHECK((pi.transpose() * q - pi.transpose()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(pi.sum() == doctest::Approx(1.0));

  const HmmModel frozen(base.initial(), Eigen::Matrix2d::Identity(), base.emission(), base.reward());
  CHECK_THROWS_AS(stationary(frozen), InvalidInput);

  // pi_b = 1/2, E_b[w] = 91/21, E_f[w] = 7/2.
  CHECK(asymptotic_ewac_rate(base) == doctest::Approx(5.0 / 12.0).epsilon(1e-14));
  CHECK(asymptotic_ewac_rate(build_canonical_model(1.0)) == 0.0);
  const HmmModel fair_twice = with_biased_row(Eigen::RowVectorXd::Constant(6, 1.0 / 6.0));
  CHECK(std::abs(asymptotic_ewac_rate(fair_twice)) < 1e-15);
}

TEST_CASE("EWAC is affine in theta") {
  std::mt19937_64 rng(17);
  const HmmModel model = build_canonical_model(0.4);
  const EwacObjective obj = build_objective(model, builtin_path(1));
  for (int k = 0; k < 20; ++k) {
    const JointPmf a = oracle::random_coupling(rng, obj.fair_marginal, obj.biased_marginal);
    const JointPmf b = oracle::random_coupling(rng, obj.fair_marginal, obj.biased_marginal);
    const double lambda = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const double mixed = ewac_of_theta(obj, lambda * a + (1.0 - lambda) * b);
    CHECK(mixed == doctest::Approx(lambda * ewac_of_theta(obj, a) +
                                   (1.0 - lambda) * ewac_of_theta(obj, b))
                       .epsilon(1e-12));
  }
  CHECK_THROWS_AS(ewac_of_theta(obj, Eigen::MatrixXd::Zero(6, 6)), InvalidInput);
}

TEST_CASE("reported example bounds") {
  const HmmModel model = build_canonical_model(0.2);
  const EwacObjective obj = build_objective(model, builtin_path(1));
  const EwacBounds plain = bounds(obj, model, ConstraintSet::none);
  const EwacBounds cs = bounds(obj, model, ConstraintSet::cs);
  CHECK(std::abs(plain.lb - (-8.0)) <= 1.0);
  CHECK(std::abs(plain.ub - 18.0) <= 1.0);
  CHECK(std::abs(cs.lb - 14.0) <= 1.0);
  CHECK(std::abs(cs.ub - 18.0) <= 1.0);
  CHECK(ewac_of_theta(obj, plain.theta_lb) == doctest::Approx(plain.lb).epsilon(1e-10));
  CHECK(ewac_of_theta(obj, plain.theta_ub) == doctest::Approx(plain.ub).epsilon(1e-10));
  const ZeroMask pm = pm_mask(6);
  for (const auto& [i, j] : pm.cells()) {
    CHECK(cs.theta_lb(i, j) == 0.0);
    CHECK(cs.theta_ub(i, j) == 0.0);
  }
}

TEST_CASE("bounds nest and contain every coupling") {
  std::mt19937_64 rng(23);
  for (int p : {1, 2}) {
    for (double eta : {0.05, 0.35, 0.65, 0.95}) {
      const HmmModel model = build_canonical_model(eta);
      const EwacObjective obj = build_objective(model, builtin_path(p));
      const EwacBounds plain = bounds(obj, model, ConstraintSet::none);
      const EwacBounds cs = bounds(obj, model, ConstraintSet::cs);
      const InhomogeneousBounds inhom = inhomogeneous_bounds(obj, model);
      CHECK(plain.lb <= cs.lb + 1e-8);
      CHECK(cs.lb <= cs.ub + 1e-8);
      CHECK(cs.ub <= plain.ub + 1e-8);
      CHECK(inhom.lb <= plain.lb + 1e-8);
      CHECK(plain.ub <= inhom.ub + 1e-8);
      for (int k = 0; k < 10; ++k) {
        const double v = ewac_of_theta(obj, oracle::random_coupling(rng, obj.fair_marginal, obj.biased_marginal));
        CHECK(plain.lb <= v + 1e-8);
        CHECK(v <= plain.ub + 1e-8);
      }
    }
  }
}

TEST_CASE("closed form agrees with counterfactual path enumeration") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 15; ++trial) {
    const HmmModel model = oracle::random_model(rng, 3);
    const ObservationPath obs = oracle::random_path(rng, 1 + trial % 6, 3);
    const EwacObjective obj = build_objective(model, obs);
    const JointPmf theta = oracle::random_coupling(rng, obj.fair_marginal, obj.biased_marginal);
    const double expected = oracle::brute_force_ewac(model, obs, theta);
    CHECK(ewac_of_theta(obj, theta) == doctest::Approx(expected).epsilon(1e-10));
  }
}
