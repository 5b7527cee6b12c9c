#include "steeplab/scenario_io.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "steeplab/errors.hpp"

namespace steeplab {

using nlohmann::json;

namespace {

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vector_json(m.row(i).transpose()));
  return out;
}

Eigen::VectorXd read_vector(const json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(std::string(what) + " entries must be numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Eigen::MatrixXd read_matrix(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw ConfigError(std::string(what) + " must be a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].is_array() ? j[0].size() : 0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Eigen::VectorXd row = read_vector(j[static_cast<std::size_t>(i)], what);
    if (row.size() != cols) throw ConfigError(std::string(what) + " rows differ in length");
    m.row(i) = row.transpose();
  }
  return m;
}

const json& require(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("scenario config is missing '") + key + "'");
  return j.at(key);
}

json source_json(const SourceFamily& s) {
  json out;
  switch (s.kind()) {
    case SourceKind::kConstant:
      out["kind"] = "constant";
      out["c"] = vector_json(s.constant_value());
      break;
    case SourceKind::kTabulated:
      out["kind"] = "tabulated";
      out["t"] = s.times();
      out["values"] = matrix_json(s.values());
      break;
    case SourceKind::kThresholdAdvanced:
      out["kind"] = "threshold-advanced";
      out["omega"] = s.ta_omega();
      out["u_theta"] = s.ta_u_theta();
      out["firing"] = s.ta_firing().code();
      break;
  }
  return out;
}

SourceFamily source_from_json(const json& j) {
  const std::string kind = require(j, "kind").get<std::string>();
  if (kind == "constant") return SourceFamily::constant(read_vector(require(j, "c"), "source.c"));
  if (kind == "tabulated") {
    const Eigen::VectorXd t = read_vector(require(j, "t"), "source.t");
    return SourceFamily::tabulated(std::vector<double>(t.data(), t.data() + t.size()),
                                   read_matrix(require(j, "values"), "source.values"));
  }
  if (kind == "threshold-advanced") {
    return SourceFamily::threshold_advanced(require(j, "omega").get<double>(),
                                            require(j, "u_theta").get<double>(),
                                            parse_firing(require(j, "firing").get<std::string>()));
  }
  throw ConfigError("unknown source kind '" + kind + "'");
}

}  // namespace

std::string scenario_to_json(const Scenario& scenario) {
  if (scenario.firing.kind() == FiringKind::kCustom) {
    throw ConfigError("custom firing families cannot be serialized");
  }
  const NetworkParams& p = scenario.params;
  json out;
  out["name"] = scenario.name;
  out["N"] = p.size();
  out["tau"] = vector_json(p.tau);
  out["omega"] = matrix_json(p.omega);
  out["u_theta"] = p.u_theta;
  out["u_init"] = vector_json(p.u_init);
  out["T"] = p.horizon;
  out["firing"] = scenario.firing.code();
  out["source"] = source_json(scenario.source);
  return out.dump(2) + "\n";
}

Scenario scenario_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("scenario config must be a JSON object");
  try {
    Scenario s;
    s.name = j.value("name", std::string("custom"));
    s.params.tau = read_vector(require(j, "tau"), "tau");
    s.params.omega = read_matrix(require(j, "omega"), "omega");
    s.params.u_theta = require(j, "u_theta").get<double>();
    s.params.u_init = read_vector(require(j, "u_init"), "u_init");
    s.params.horizon = require(j, "T").get<double>();
    s.firing = parse_firing(require(j, "firing").get<std::string>());
    s.source = source_from_json(require(j, "source"));
    if (j.contains("N") && require(j, "N").get<int>() != s.params.size()) {
      throw ConfigError("N does not match the length of tau");
    }
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario config has a wrongly typed field: ") + e.what());
  }
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_json(buf.str());
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << scenario_to_json(scenario);
}

}  // namespace steeplab
