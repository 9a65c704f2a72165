#include <doctest.h>

#include <cmath>
#include <numeric>

#include "ewac/config.hpp"
#include "ewac/errors.hpp"
#include "ewac/scenario.hpp"

using namespace ewac;

namespace {

struct Moments {
  double mean = 0.0;
  double se = 0.0;
};

Moments moments(const std::vector<WacSample>& samples) {
  double sum = 0.0;
  double sq = 0.0;
  for (const auto& s : samples) {
    sum += s.wac;
    sq += s.wac * s.wac;
  }
  const double n = static_cast<double>(samples.size());
  Moments m;
  m.mean = sum / n;
  m.se = std::sqrt(std::max(sq / n - m.mean * m.mean, 0.0) / n);
  return m;
}

}  // namespace

TEST_CASE("no cheating means no attributable winnings") {
  const HmmModel model = build_canonical_model(1.0);
  const auto samples = sample_wac(model, builtin_path(2), copula_pmf(model, CopulaKind::independence), 200, 4);
  for (const auto& s : samples) {
    CHECK(s.wac == 0.0);
    CHECK(s.counterfactual_path == builtin_path(2));
  }
}

TEST_CASE("counterfactuals keep fair periods") {
  const HmmModel model = build_canonical_model(0.5);
  const ObservationPath obs = builtin_path(1);
  const auto samples = sample_wac(model, obs, copula_pmf(model, CopulaKind::independence), 100, 9);
  for (const auto& s : samples) {
    for (Eigen::Index t = 0; t < obs.size(); ++t) {
      if (s.hidden[static_cast<std::size_t>(t)] == HiddenState::fair) {
        CHECK(s.counterfactual_path[t] == obs[t]);
      }
    }
  }
}

TEST_CASE("comonotonic coupling never attributes losses") {
  const HmmModel model = build_canonical_model(0.5);
  const auto samples = sample_wac(model, builtin_path(1), copula_pmf(model, CopulaKind::comonotonic), 2000, 1);
  for (const auto& s : samples) CHECK(s.wac >= -1e-12);
}

TEST_CASE("sample means track the closed form") {
  const HmmModel model = build_canonical_model(0.5);
  const ObservationPath obs = builtin_path(1);
  const EwacObjective obj = build_objective(model, obs);
  for (CopulaKind kind : {CopulaKind::independence, CopulaKind::comonotonic,
                          CopulaKind::countermonotonic}) {
    const JointPmf theta = copula_pmf(model, kind);
    const Moments m = moments(sample_wac(model, obs, theta, 10000, 2));
    CHECK(std::abs(m.mean - ewac_of_theta(obj, theta)) <= 3.0 * m.se);
  }
}

TEST_CASE("Monte-Carlo error shrinks with the sample count") {
  const HmmModel model = build_canonical_model(0.5);
  const ObservationPath obs = builtin_path(2);
  const JointPmf theta = copula_pmf(model, CopulaKind::independence);
  const double target = ewac_of_theta(build_objective(model, obs), theta);
  auto rms_error = [&](int count) {
    double acc = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const double err = moments(sample_wac(model, obs, theta, count, seed)).mean - target;
      acc += err * err;
    }
    return std::sqrt(acc / 20.0);
  };
  // Sixteen times the samples should cut the error by about four.
  const double coarse = rms_error(100);
  const double fine = rms_error(1600);
  CHECK(fine < coarse / 2.0);
}

TEST_CASE("sampling is reproducible and rejects bad inputs") {
  const HmmModel model = build_canonical_model(0.3);
  const JointPmf theta = copula_pmf(model, CopulaKind::countermonotonic);
  const auto a = sample_wac(model, builtin_path(1), theta, 50, 77);
  const auto b = sample_wac(model, builtin_path(1), theta, 50, 77);
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k].wac == b[k].wac);
  CHECK_THROWS_AS(sample_wac(model, builtin_path(1), Eigen::MatrixXd::Identity(6, 6) / 6.0, 5, 1),
                  InvalidInput);
}

TEST_CASE("eta sweep on the first path") {
  const std::vector<SweepRow> rows = eta_sweep(builtin_path(1), default_eta_grid());
  REQUIRE(rows.size() == 99);
  CHECK(rows.front().grid == doctest::Approx(0.01));
  CHECK(rows.back().grid == doctest::Approx(0.99));

  std::size_t peak = 0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const SweepRow& r = rows[k];
    CHECK(*r.lb <= *r.lb_cs + 1e-8);
    CHECK(*r.ub_cs <= *r.ub + 1e-8);
    CHECK(*r.lb_inhom <= *r.lb + 1e-8);
    CHECK(*r.ub <= *r.ub_inhom + 1e-8);
    for (double v : {*r.ewac_I, *r.ewac_P, *r.ewac_N}) {
      CHECK(*r.lb <= v + 1e-8);
      CHECK(v <= *r.ub + 1e-8);
    }
    CHECK(*r.naive == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    if (*r.ewac_I > *rows[peak].ewac_I) peak = k;
  }
  // Independence benchmark: zero-sum rolls leave little at both ends and a
  // hump in between.
  CHECK(std::abs(*rows.back().ewac_I) < 0.5);
  CHECK(*rows[peak].ewac_I > *rows.front().ewac_I);
  CHECK(*rows[peak].ewac_I > *rows.back().ewac_I);
  CHECK(*rows.front().ewac_N < 0.0);
}

TEST_CASE("eta sweep options") {
  EtaSweepOptions lean;
  lean.restriction = ConstraintSet::none;
  lean.inhomogeneous = false;
  lean.copulas = false;
  const auto rows = eta_sweep(builtin_path(2), {0.25, 0.75}, lean);
  REQUIRE(rows.size() == 2);
  CHECK_FALSE(rows[0].lb_cs.has_value());
  CHECK_FALSE(rows[0].ub_inhom.has_value());
  CHECK_FALSE(rows[0].ewac_I.has_value());
  CHECK(*rows[1].naive == doctest::Approx(20.0));
}

TEST_CASE("horizon grid") {
  const auto grid = default_horizon_grid(1000);
  CHECK(grid == std::vector<Eigen::Index>{10, 20, 50, 100, 200, 500, 1000});
  CHECK(default_horizon_grid(300).back() == 300);
  CHECK_THROWS_AS(horizon_sweep(0.5, {10, 10}, 1), InvalidInput);
  CHECK_THROWS_AS(horizon_sweep(0.5, {}, 1), InvalidInput);
  CHECK_THROWS_AS(horizon_sweep(0.5, {0, 5}, 1), InvalidInput);
}

TEST_CASE("horizon sweep rows") {
  const auto rows = horizon_sweep(0.5, {10, 100, 1000}, 3);
  REQUIRE(rows.size() == 3);
  const HmmModel model = build_canonical_model(0.5);
  const SimulatedRun run = simulate(model, 1000, 3);
  for (const SweepRow& r : rows) {
    const auto T = static_cast<Eigen::Index>(r.grid);
    const ObservationPath prefix = run.observations.prefix(T);
    double w_obs = 0.0;
    for (int v : prefix.one_based()) w_obs += v;
    CHECK(*r.naive == doctest::Approx(w_obs / r.grid - 3.5).epsilon(1e-12));
    CHECK(*r.limit == doctest::Approx(5.0 / 12.0));
    CHECK(*r.lb <= *r.ub + 1e-10);
  }
  // Identical seeds reproduce the sweep.
  const auto again = horizon_sweep(0.5, {10, 100, 1000}, 3);
  for (std::size_t k = 0; k < rows.size(); ++k) CHECK(*again[k].ub == *rows[k].ub);
}
