#ifndef EWAC_HMM_HPP
#define EWAC_HMM_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace ewac {

/// Hidden regime of the casino. Index 0 is the fair die, index 1 the loaded
/// ("biased") die; every matrix in the library uses this row order.
enum class HiddenState : std::uint8_t { fair = 0, biased = 1 };

inline constexpr Eigen::Index kFair = 0;
inline constexpr Eigen::Index kBiased = 1;

/// Two-state HMM with K observation symbols and a per-symbol reward.
///
/// Holds the initial distribution `initial` (length 2), the transition matrix
/// `transition` (2x2, row-stochastic), the emission matrix `emission`
/// (2xK, row-stochastic) and the reward vector `reward` (length K, strictly
/// increasing). The constructor validates all of these and throws
/// InvalidInput on violation.
class HmmModel {
 public:
  HmmModel(Eigen::Vector2d initial, Eigen::Matrix2d transition,
           Eigen::MatrixXd emission, Eigen::VectorXd reward);

  Eigen::Index num_states() const { return 2; }
  Eigen::Index num_symbols() const { return emission_.cols(); }

  const Eigen::Vector2d& initial() const { return initial_; }
  const Eigen::Matrix2d& transition() const { return transition_; }
  const Eigen::MatrixXd& emission() const { return emission_; }
  const Eigen::VectorXd& reward() const { return reward_; }

  Eigen::VectorXd fair_emission() const { return emission_.row(kFair).transpose(); }
  Eigen::VectorXd biased_emission() const { return emission_.row(kBiased).transpose(); }

 private:
  Eigen::Vector2d initial_;
  Eigen::Matrix2d transition_;
  Eigen::MatrixXd emission_;
  Eigen::VectorXd reward_;
};

/// Sequence of observed symbols, stored zero-based.
class ObservationPath {
 public:
  ObservationPath(std::vector<int> symbols, Eigen::Index num_symbols);

  /// Builds a path from symbols numbered 1..K, as used in files and on the
  /// command line. Errors name the offending (one-based) position.
  static ObservationPath from_one_based(const std::vector<int>& symbols,
                                        Eigen::Index num_symbols);

  Eigen::Index size() const { return static_cast<Eigen::Index>(symbols_.size()); }
  Eigen::Index num_symbols() const { return num_symbols_; }
  int operator[](Eigen::Index t) const { return symbols_[static_cast<std::size_t>(t)]; }
  const std::vector<int>& symbols() const { return symbols_; }
  std::vector<int> one_based() const;

  /// First `length` symbols.
  ObservationPath prefix(Eigen::Index length) const;

  friend bool operator==(const ObservationPath&, const ObservationPath&) = default;

 private:
  std::vector<int> symbols_;
  Eigen::Index num_symbols_;
};

using HiddenPath = std::vector<HiddenState>;

/// Per-period posterior marginals; row t is (P(fair | o), P(biased | o)).
struct SmoothedPosterior {
  Eigen::MatrixX2d delta;
  double log_likelihood = 0.0;

  Eigen::Index size() const { return delta.rows(); }
  double fair(Eigen::Index t) const { return delta(t, kFair); }
  double biased(Eigen::Index t) const { return delta(t, kBiased); }
};

struct SimulatedRun {
  HiddenPath hidden;
  ObservationPath observations;
};

/// Canonical casino: p = (eta, 1-eta), both transition rows (eta, 1-eta),
/// fair die uniform over six faces, loaded die proportional to (1,...,6),
/// reward w_i = i.
HmmModel build_canonical_model(double eta);

/// Scaled forward-backward smoothing. Throws ZeroLikelihood if the path is
/// impossible under the model.
SmoothedPosterior smooth(const HmmModel& model, const ObservationPath& obs);

/// Forward filtering / backward sampling of `count` hidden paths from
/// P(H_{1:T} | o_{1:T}). Sample s uses RNG stream s of `seed`.
std::vector<HiddenPath> sample_hidden_paths(const HmmModel& model,
                                            const ObservationPath& obs,
                                            int count, std::uint64_t seed);

/// Forward draw of (hidden path, observations) of length `horizon`.
SimulatedRun simulate(const HmmModel& model, Eigen::Index horizon,
                      std::uint64_t seed);

void check_compatible(const HmmModel& model, const ObservationPath& obs);

}  // namespace ewac

#endif  // EWAC_HMM_HPP
