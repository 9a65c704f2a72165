#ifndef EWAC_CONFIG_HPP
#define EWAC_CONFIG_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ewac/engine.hpp"
#include "ewac/hmm.hpp"

namespace ewac {

/// The two length-30 roll sequences used throughout the experiments, one-based.
inline constexpr std::array<int, 30> kBuiltinPath1{3, 5, 1, 2, 5, 4, 6, 3, 5, 2, 4, 3, 6, 4, 1,
                                                   2, 6, 4, 2, 3, 2, 1, 6, 3, 4, 1, 5, 1, 5, 6};
inline constexpr std::array<int, 30> kBuiltinPath2{6, 5, 6, 4, 1, 3, 5, 1, 2, 2, 6, 3, 4, 5, 5,
                                                   3, 2, 5, 6, 3, 4, 5, 5, 4, 6, 4, 4, 6, 5, 5};

ObservationPath builtin_path(int index);

struct ExplicitModel {
  std::vector<double> initial;
  std::vector<std::vector<double>> transition;
  std::vector<std::vector<double>> emission;
  std::vector<double> reward;

  friend bool operator==(const ExplicitModel&, const ExplicitModel&) = default;
};

/// Everything a CLI run needs. Exactly one of `eta` / `model` is set once the
/// configuration is resolved; a missing model falls back to eta = 0.5.
struct ExperimentConfig {
  std::optional<double> eta;
  std::optional<ExplicitModel> model;
  std::string path = "builtin:1";  // builtin:N, file:<name>, or "3,5,1,..."
  ConstraintSet constraints = ConstraintSet::cs;
  std::vector<double> eta_grid;               // empty: 0.01..0.99
  std::vector<std::int64_t> horizon_grid;     // empty: 1-2-5 grid up to 1e5
  std::vector<std::string> thetas;            // empty: every kind
  int samples = 10000;
  std::uint64_t seed = 1;
  std::string out;  // empty: standard output

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& filename);

HmmModel resolve_model(const ExperimentConfig& config);
ObservationPath resolve_path(const std::string& source, Eigen::Index num_symbols);

/// Parses a comma / whitespace separated list of one-based symbols; `origin`
/// names the source in error messages.
std::vector<int> parse_symbol_list(const std::string& text, const std::string& origin);

}  // namespace ewac

#endif  // EWAC_CONFIG_HPP
