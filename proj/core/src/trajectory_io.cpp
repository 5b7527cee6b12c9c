#include "steeplab/trajectory_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "steeplab/errors.hpp"

namespace steeplab {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const std::vector<double>& times) {
  os << "t";
  for (int j = 1; j <= traj.dim(); ++j) os << ",u_" << j;
  os << '\n';
  for (double t : times) {
    const Eigen::VectorXd u = traj.value(t);
    os << format_double(t);
    for (Eigen::Index j = 0; j < u.size(); ++j) os << ',' << format_double(u[j]);
    os << '\n';
  }
}

void save_trajectory_csv(const std::string& path, const Trajectory& traj, const std::vector<double>& times) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path);
  write_trajectory_csv(f, traj, times);
}

Trajectory read_trajectory_csv(std::istream& is, const std::string& name) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("empty trajectory CSV");
  std::size_t cols = 1;
  for (char c : line) cols += (c == ',');
  if (line.rfind("t,", 0) != 0 || cols < 2) throw ConfigError("trajectory CSV header must start with 't,u_1'");
  const std::size_t dim = cols - 1;

  std::vector<double> times;
  std::vector<Eigen::VectorXd> values;
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> nums;
    while (std::getline(ls, cell, ',')) {
      try {
        std::size_t used = 0;
        nums.push_back(std::stod(cell, &used));
        if (used != cell.size() && cell.find_first_not_of(" \r", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ConfigError("bad number '" + cell + "' in trajectory CSV row " + std::to_string(row));
      }
    }
    if (nums.size() != cols) throw ConfigError("wrong column count in trajectory CSV row " + std::to_string(row));
    times.push_back(nums[0]);
    values.push_back(Eigen::Map<Eigen::VectorXd>(nums.data() + 1, static_cast<Eigen::Index>(dim)));
  }
  if (times.size() < 2) throw ConfigError("trajectory CSV needs at least two rows");
  return Trajectory::from_samples(std::move(times), std::move(values), name);
}

Trajectory load_trajectory_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read " + path);
  return read_trajectory_csv(f, path);
}

std::string crossings_to_json(const std::vector<CrossingEvent>& events) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& e : events) {
    arr.push_back({{"t", e.t}, {"component", e.component + 1}, {"direction", to_string(e.direction)}});
  }
  return arr.dump(2);
}

std::vector<CrossingEvent> crossings_from_json(const std::string& text) {
  std::vector<CrossingEvent> out;
  try {
    const auto arr = nlohmann::json::parse(text);
    for (const auto& e : arr) {
      out.push_back({e.at("t").get<double>(), e.at("component").get<int>() - 1,
                     direction_from_string(e.at("direction").get<std::string>())});
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("bad crossings JSON: ") + ex.what());
  }
  return out;
}

}  // namespace steeplab
