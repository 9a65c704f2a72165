#include "ewac/hmm.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "ewac/errors.hpp"
#include "ewac/rng.hpp"

namespace ewac {

namespace {

constexpr double kStochasticTol = 1e-12;

template <typename Derived>
void require_distribution(const Eigen::MatrixBase<Derived>& v,
                          const std::string& what) {
  if (!v.allFinite() || (v.array() < 0.0).any()) {
    throw InvalidInput(what + " has negative or non-finite entries");
  }
  if (std::abs(v.sum() - 1.0) > kStochasticTol) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << " sums to " << v.sum() << ", expected 1";
    throw InvalidInput(msg.str());
  }
}

// Normalised forward messages: row t is P(H_t | o_{1:t}).
struct ForwardPass {
  Eigen::MatrixX2d alpha;
  Eigen::VectorXd scale;  // P(o_t | o_{1:t-1})
};

ForwardPass forward_filter(const HmmModel& model, const ObservationPath& obs) {
  const Eigen::Index T = obs.size();
  ForwardPass fp{Eigen::MatrixX2d(T, 2), Eigen::VectorXd(T)};
  const auto& E = model.emission();
  Eigen::RowVector2d prior = model.initial().transpose();
  for (Eigen::Index t = 0; t < T; ++t) {
    if (t > 0) prior = fp.alpha.row(t - 1) * model.transition();
    Eigen::RowVector2d a = prior.cwiseProduct(E.col(obs[t]).transpose());
    const double c = a.sum();
    if (!(c > 0.0)) {
      throw ZeroLikelihood("observation " + std::to_string(obs[t] + 1) +
                           " at position " + std::to_string(t + 1) +
                           " has zero probability given the preceding path");
    }
    fp.alpha.row(t) = a / c;
    fp.scale[t] = c;
  }
  return fp;
}

}  // namespace

HmmModel::HmmModel(Eigen::Vector2d initial, Eigen::Matrix2d transition,
                   Eigen::MatrixXd emission, Eigen::VectorXd reward)
    : initial_(std::move(initial)),
      transition_(std::move(transition)),
      emission_(std::move(emission)),
      reward_(std::move(reward)) {
  if (emission_.rows() != 2 || emission_.cols() < 1) {
    throw InvalidInput("emission matrix must be 2 x K with K >= 1");
  }
  if (reward_.size() != emission_.cols()) {
    throw InvalidInput("reward vector length must equal the number of symbols");
  }
  require_distribution(initial_, "initial distribution");
  for (Eigen::Index h = 0; h < 2; ++h) {
    require_distribution(transition_.row(h), "transition row " + std::to_string(h + 1));
    require_distribution(emission_.row(h), "emission row " + std::to_string(h + 1));
  }
  if (!reward_.allFinite()) throw InvalidInput("reward vector has non-finite entries");
  for (Eigen::Index i = 1; i < reward_.size(); ++i) {
    if (!(reward_[i] > reward_[i - 1])) {
      throw InvalidInput("reward must be strictly increasing in the symbol index (w_" +
                         std::to_string(i + 1) + " <= w_" + std::to_string(i) + ")");
    }
  }
}

ObservationPath::ObservationPath(std::vector<int> symbols, Eigen::Index num_symbols)
    : symbols_(std::move(symbols)), num_symbols_(num_symbols) {
  if (symbols_.empty()) throw InvalidInput("observation path must be non-empty");
  for (std::size_t t = 0; t < symbols_.size(); ++t) {
    if (symbols_[t] < 0 || symbols_[t] >= num_symbols_) {
      throw InvalidInput("symbol at position " + std::to_string(t + 1) +
                         " out of range");
    }
  }
}

ObservationPath ObservationPath::from_one_based(const std::vector<int>& symbols,
                                                Eigen::Index num_symbols) {
  std::vector<int> zero_based(symbols.size());
  for (std::size_t t = 0; t < symbols.size(); ++t) {
    if (symbols[t] < 1 || symbols[t] > num_symbols) {
      throw InvalidInput("symbol " + std::to_string(symbols[t]) + " at position " +
                         std::to_string(t + 1) + " is outside 1.." +
                         std::to_string(num_symbols));
    }
    zero_based[t] = symbols[t] - 1;
  }
  return ObservationPath(std::move(zero_based), num_symbols);
}

std::vector<int> ObservationPath::one_based() const {
  std::vector<int> out(symbols_);
  for (int& s : out) ++s;
  return out;
}

ObservationPath ObservationPath::prefix(Eigen::Index length) const {
  if (length < 1 || length > size()) throw InvalidInput("prefix length out of range");
  return ObservationPath(
      std::vector<int>(symbols_.begin(), symbols_.begin() + length), num_symbols_);
}

void check_compatible(const HmmModel& model, const ObservationPath& obs) {
  if (obs.num_symbols() != model.num_symbols()) {
    throw InvalidInput("observation alphabet size " + std::to_string(obs.num_symbols()) +
                       " does not match model (" + std::to_string(model.num_symbols()) +
                       " symbols)");
  }
}

HmmModel build_canonical_model(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidInput("eta must lie in [0, 1]");
  Eigen::Vector2d p(eta, 1.0 - eta);
  Eigen::Matrix2d Q;
  Q << eta, 1.0 - eta,
       eta, 1.0 - eta;
  Eigen::MatrixXd E(2, 6);
  E.row(kFair).setConstant(1.0 / 6.0);
  for (int i = 0; i < 6; ++i) E(kBiased, i) = (i + 1) / 21.0;
  Eigen::VectorXd w = Eigen::VectorXd::LinSpaced(6, 1.0, 6.0);
  return HmmModel(p, Q, E, w);
}

SmoothedPosterior smooth(const HmmModel& model, const ObservationPath& obs) {
  check_compatible(model, obs);
  const Eigen::Index T = obs.size();
  const ForwardPass fp = forward_filter(model, obs);
  const auto& E = model.emission();
  const auto& Q = model.transition();

  SmoothedPosterior post;
  post.delta.resize(T, 2);
  post.log_likelihood = fp.scale.array().log().sum();

  // beta_t scaled so that alpha_t .* beta_t is the smoothed marginal.
  Eigen::Vector2d beta = Eigen::Vector2d::Ones();
  post.delta.row(T - 1) = fp.alpha.row(T - 1);
  for (Eigen::Index t = T - 2; t >= 0; --t) {
    beta = Q * E.col(obs[t + 1]).cwiseProduct(beta) / fp.scale[t + 1];
    Eigen::RowVector2d d = fp.alpha.row(t).cwiseProduct(beta.transpose());
    post.delta.row(t) = d / d.sum();
  }
  return post;
}

std::vector<HiddenPath> sample_hidden_paths(const HmmModel& model,
                                            const ObservationPath& obs, int count,
                                            std::uint64_t seed) {
  if (count < 1) throw InvalidInput("sample count must be at least 1");
  check_compatible(model, obs);
  const Eigen::Index T = obs.size();
  const ForwardPass fp = forward_filter(model, obs);
  const auto& Q = model.transition();

  std::vector<HiddenPath> paths(static_cast<std::size_t>(count), HiddenPath(T));
  for (int s = 0; s < count; ++s) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(s));
    HiddenPath& path = paths[static_cast<std::size_t>(s)];
    Eigen::Index next = sample_categorical(fp.alpha.row(T - 1), rng);
    path[T - 1] = static_cast<HiddenState>(next);
    for (Eigen::Index t = T - 2; t >= 0; --t) {
      Eigen::RowVector2d weights = fp.alpha.row(t).cwiseProduct(Q.col(next).transpose());
      next = sample_categorical(weights, rng);
      path[t] = static_cast<HiddenState>(next);
    }
  }
  return paths;
}

SimulatedRun simulate(const HmmModel& model, Eigen::Index horizon, std::uint64_t seed) {
  if (horizon < 1) throw InvalidInput("horizon must be at least 1");
  Rng rng = make_rng(seed);
  HiddenPath hidden(horizon);
  std::vector<int> symbols(static_cast<std::size_t>(horizon));
  Eigen::Index h = sample_categorical(model.initial(), rng);
  for (Eigen::Index t = 0; t < horizon; ++t) {
    if (t > 0) h = sample_categorical(model.transition().row(h), rng);
    hidden[t] = static_cast<HiddenState>(h);
    symbols[t] = static_cast<int>(sample_categorical(model.emission().row(h), rng));
  }
  return {std::move(hidden), ObservationPath(std::move(symbols), model.num_symbols())};
}

}  // namespace ewac
