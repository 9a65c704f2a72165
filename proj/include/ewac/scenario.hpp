#ifndef EWAC_SCENARIO_HPP
#define EWAC_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "ewac/engine.hpp"
#include "ewac/hmm.hpp"

namespace ewac {

/// One posterior draw of the winnings attributable to cheating.
struct WacSample {
  double wac = 0.0;
  HiddenPath hidden;
  ObservationPath counterfactual_path;
};

/// Draws `count` WAC samples under theta: hidden paths come from FFBS, periods
/// in the fair state keep the observed roll, and loaded periods redraw the
/// fair-die roll from theta(., o_t) / e_b,o_t.
std::vector<WacSample> sample_wac(const HmmModel& model, const ObservationPath& obs,
                                  const JointPmf& theta, int count, std::uint64_t seed);

/// Everything reported for a single (model, path) pair.
struct PointAnalysis {
  EwacBounds homogeneous;
  std::optional<EwacBounds> restricted;
  InhomogeneousBounds inhomogeneous;
  double ewac_independence = 0.0;
  double ewac_comonotonic = 0.0;
  double ewac_countermonotonic = 0.0;
  double naive = 0.0;
};

PointAnalysis analyze(const HmmModel& model, const ObservationPath& obs,
                      ConstraintSet restriction = ConstraintSet::cs);

struct SweepRow {
  double grid = 0.0;  // eta, or T for horizon sweeps
  std::optional<double> lb, ub;
  std::optional<double> lb_cs, ub_cs;
  std::optional<double> lb_inhom, ub_inhom;
  std::optional<double> ewac_I, ewac_P, ewac_N;
  std::optional<double> naive;
  std::optional<double> limit;
};

struct EtaSweepOptions {
  ConstraintSet restriction = ConstraintSet::cs;
  bool inhomogeneous = true;
  bool copulas = true;
};

/// 0.01, 0.02, ..., 0.99.
std::vector<double> default_eta_grid();

/// Canonical model at every eta of the grid; bounds, restricted bounds,
/// time-inhomogeneous bounds, copula benchmarks and the naive estimate.
std::vector<SweepRow> eta_sweep(const ObservationPath& path, const std::vector<double>& eta_grid,
                                const EtaSweepOptions& options = {});

/// 10, 20, 50, 100, ... up to and including `max_horizon`.
std::vector<Eigen::Index> default_horizon_grid(Eigen::Index max_horizon = 100000);

/// Simulates one canonical path of length max(grid) and, for each prefix
/// length T, reports lb/T, ub/T, naive/T and the limiting rate. Posteriors are
/// recomputed from each prefix alone.
std::vector<SweepRow> horizon_sweep(double eta, const std::vector<Eigen::Index>& horizon_grid,
                                    std::uint64_t seed);

}  // namespace ewac

#endif  // EWAC_SCENARIO_HPP
