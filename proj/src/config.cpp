#include "ewac/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "ewac/errors.hpp"

namespace ewac {

using nlohmann::json;

namespace {

template <typename T>
T field(const json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("config field '") + key + "': " + e.what());
  }
}

Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& rows, const char* what) {
  if (rows.empty()) throw InvalidInput(std::string(what) + " is empty");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows.front().size()) {
      throw InvalidInput(std::string(what) + " row " + std::to_string(r + 1) + " has the wrong length");
    }
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return m;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

ObservationPath builtin_path(int index) {
  if (index == 1) return ObservationPath::from_one_based({kBuiltinPath1.begin(), kBuiltinPath1.end()}, 6);
  if (index == 2) return ObservationPath::from_one_based({kBuiltinPath2.begin(), kBuiltinPath2.end()}, 6);
  throw InvalidInput("unknown builtin path " + std::to_string(index) + " (expected 1 or 2)");
}

std::vector<int> parse_symbol_list(const std::string& text, const std::string& origin) {
  std::vector<int> symbols;
  std::size_t line = 1;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    std::size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size()) {
      throw InvalidInput(origin + ": line " + std::to_string(line) + ", entry " +
                         std::to_string(symbols.size() + 1) + ": '" + token + "' is not an integer");
    }
    symbols.push_back(value);
    token.clear();
  };
  for (char ch : text) {
    if (ch == ',' || std::isspace(static_cast<unsigned char>(ch))) {
      flush();
      if (ch == '\n') ++line;
    } else {
      token.push_back(ch);
    }
  }
  flush();
  if (symbols.empty()) throw InvalidInput(origin + ": no symbols found");
  return symbols;
}

ObservationPath resolve_path(const std::string& source, Eigen::Index num_symbols) {
  if (source.rfind("builtin:", 0) == 0) {
    const std::string id = source.substr(8);
    if (id != "1" && id != "2") throw InvalidInput("unknown builtin path '" + source + "'");
    ObservationPath p = builtin_path(std::stoi(id));
    if (num_symbols != 6) throw InvalidInput("builtin paths need a six-symbol model");
    return p;
  }
  if (source.rfind("file:", 0) == 0) {
    const std::string name = source.substr(5);
    std::ifstream in(name);
    if (!in) throw InvalidInput("cannot open path file '" + name + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return ObservationPath::from_one_based(parse_symbol_list(buffer.str(), name), num_symbols);
  }
  return ObservationPath::from_one_based(parse_symbol_list(source, "--path"), num_symbols);
}

json config_to_json(const ExperimentConfig& config) {
  json doc;
  if (config.eta) doc["eta"] = *config.eta;
  if (config.model) {
    doc["model"] = {{"p", config.model->initial},
                    {"Q", config.model->transition},
                    {"E", config.model->emission},
                    {"w", config.model->reward}};
  }
  doc["path"] = config.path;
  doc["constraints"] = std::string(to_string(config.constraints));
  doc["eta_grid"] = config.eta_grid;
  doc["horizon_grid"] = config.horizon_grid;
  doc["thetas"] = config.thetas;
  doc["samples"] = config.samples;
  doc["seed"] = config.seed;
  doc["out"] = config.out;
  return doc;
}

ExperimentConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw InvalidInput("config must be a JSON object");
  static const std::vector<std::string> known{"eta",     "model",  "path",    "constraints",
                                              "eta_grid", "horizon_grid", "thetas", "samples",
                                              "seed",    "out"};
  for (const auto& item : doc.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
      throw InvalidInput("config: unknown field '" + item.key() + "'");
    }
  }

  ExperimentConfig cfg;
  if (doc.contains("eta")) cfg.eta = field<double>(doc, "eta");
  if (doc.contains("model")) {
    const json& m = doc.at("model");
    ExplicitModel em;
    em.initial = field<std::vector<double>>(m, "p");
    em.transition = field<std::vector<std::vector<double>>>(m, "Q");
    em.emission = field<std::vector<std::vector<double>>>(m, "E");
    em.reward = field<std::vector<double>>(m, "w");
    cfg.model = std::move(em);
  }
  if (cfg.eta && cfg.model) throw InvalidInput("config: give either 'eta' or 'model', not both");
  if (doc.contains("path")) {
    const json& p = doc.at("path");
    if (p.is_array()) {
      std::string joined;
      for (const auto& s : p) {
        if (!s.is_number_integer()) throw InvalidInput("config field 'path': entries must be integers");
        if (!joined.empty()) joined += ",";
        joined += std::to_string(s.get<int>());
      }
      cfg.path = joined;
    } else {
      cfg.path = field<std::string>(doc, "path");
    }
  }
  if (doc.contains("constraints")) cfg.constraints = parse_constraint_set(field<std::string>(doc, "constraints"));
  if (doc.contains("eta_grid")) cfg.eta_grid = field<std::vector<double>>(doc, "eta_grid");
  if (doc.contains("horizon_grid")) cfg.horizon_grid = field<std::vector<std::int64_t>>(doc, "horizon_grid");
  if (doc.contains("thetas")) cfg.thetas = field<std::vector<std::string>>(doc, "thetas");
  if (doc.contains("samples")) cfg.samples = field<int>(doc, "samples");
  if (doc.contains("seed")) cfg.seed = field<std::uint64_t>(doc, "seed");
  if (doc.contains("out")) cfg.out = field<std::string>(doc, "out");
  return cfg;
}

ExperimentConfig load_config(const std::string& filename) {
  std::ifstream in(filename);
  if (!in) throw InvalidInput("cannot open config file '" + filename + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput("config " + filename + ": " + e.what());
  }
  return config_from_json(doc);
}

HmmModel resolve_model(const ExperimentConfig& config) {
  if (config.model) {
    const ExplicitModel& m = *config.model;
    const Eigen::MatrixXd Q = to_matrix(m.transition, "Q");
    if (Q.rows() != 2 || Q.cols() != 2) throw InvalidInput("Q must be 2 x 2");
    if (m.initial.size() != 2) throw InvalidInput("p must have two entries");
    return HmmModel(Eigen::Vector2d(m.initial[0], m.initial[1]), Q, to_matrix(m.emission, "E"),
                    to_vector(m.reward));
  }
  return build_canonical_model(config.eta.value_or(0.5));
}

}  // namespace ewac
