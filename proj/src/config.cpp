#include "explore/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace explore {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': bad number '" + v +
                                "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  const int i = static_cast<int>(x);
  if (i != x)
    throw std::invalid_argument("config key '" + key + "': expected integer");
  return i;
}

uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const uint64_t x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': bad integer '" + v +
                                "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "on") return true;
  if (v == "0" || v == "false" || v == "off") return false;
  throw std::invalid_argument("config key '" + key + "': bad flag '" + v +
                              "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::istringstream in(v);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": empty key or value");
    kv[key] = value;
  }
  return kv;
}

std::map<std::string, std::string> load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str());
}

RunSettings settings_from_map(const std::map<std::string, std::string>& kv) {
  RunSettings s;
  auto& ep = s.episode;

  for (const auto& [key, value] : kv) {
    if (key == "world") s.world_path = value;
    else if (key == "world_seeds") {
      for (const auto& t : split_list(value))
        s.world_seeds.push_back(to_u64(key, t));
    } else if (key == "gen_size_m") s.gen_size_m = to_double(key, value);
    else if (key == "gen_resolution") s.gen_resolution = to_double(key, value);
    else if (key == "gen_corridor_m") s.gen_corridor_m = to_double(key, value);
    else if (key == "gen_wall_m") s.gen_wall_m = to_double(key, value);
    else if (key == "gen_braid") s.gen_braid = to_double(key, value);
    else if (key == "strategy" || key == "strategies") {
      s.strategies.clear();
      for (const auto& t : split_list(value)) {
        const auto st = parse_strategy(t);
        if (!st)
          throw std::invalid_argument("unknown strategy '" + t + "'");
        s.strategies.push_back(*st);
      }
      if (key == "strategy" && s.strategies.size() == 1)
        ep.strategy = s.strategies.front();
    } else if (key == "episodes") s.episodes_per_strategy = to_int(key, value);
    else if (key == "thresholds_m2") {
      for (const auto& t : split_list(value))
        s.thresholds_m2.push_back(to_double(key, t));
    } else if (key == "thresholds_frac") {
      for (const auto& t : split_list(value))
        s.thresholds_frac.push_back(to_double(key, t));
    } else if (key == "base_seed") s.base_seed = to_u64(key, value);
    else if (key == "out_dir") s.out_dir = value;
    else if (key == "seed") ep.seed = to_u64(key, value);
    else if (key == "time_budget_s") ep.time_budget_s = to_double(key, value);
    else if (key == "scan_period_s") ep.scan_period_s = to_double(key, value);
    else if (key == "dt") ep.dt = to_double(key, value);
    else if (key == "v_max") ep.v_max = to_double(key, value);
    else if (key == "psi_max") ep.psi_max = to_double(key, value);
    else if (key == "robot_radius") ep.robot_radius = to_double(key, value);
    else if (key == "goal_tolerance") ep.goal_tolerance = to_double(key, value);
    else if (key == "replan_period_s")
      ep.replan_period_s = to_double(key, value);
    else if (key == "done_threshold") ep.done_threshold = to_double(key, value);
    else if (key == "start_x" || key == "start_y" || key == "start_psi") {
      // handled below so partial triples are caught
    } else if (key == "epsilon") ep.planner.epsilon = to_double(key, value);
    else if (key == "alpha") ep.planner.alpha = to_double(key, value);
    else if (key == "n_max") ep.planner.n_max = to_int(key, value);
    else if (key == "lambda") ep.planner.lambda = to_double(key, value);
    else if (key == "gamma") ep.planner.gamma = to_double(key, value);
    else if (key == "r_gain_max") ep.planner.r_gain_max = to_double(key, value);
    else if (key == "n_gain_samples")
      ep.planner.n_gain_samples = to_int(key, value);
    else if (key == "n_abs_max") ep.planner.n_abs_max = to_int(key, value);
    else if (key == "sensor_range") {
      ep.planner.sensor_range = to_double(key, value);
      ep.lidar.max_range = to_double(key, value);
    } else if (key == "clamp_occupied_gain")
      ep.planner.clamp_occupied_gain = to_bool(key, value);
    else if (key == "strict_eq2") ep.planner.strict_eq2 = to_bool(key, value);
    else if (key == "fov_deg")
      ep.lidar.fov = to_double(key, value) * kPi / 180.0;
    else if (key == "ray_count") ep.lidar.ray_count = to_int(key, value);
    else if (key == "range_noise_sigma")
      ep.lidar.range_noise_sigma = to_double(key, value);
    else if (key == "l_occ") ep.map.l_occ = to_double(key, value);
    else if (key == "l_free") ep.map.l_free = to_double(key, value);
    else if (key == "l_min") ep.map.l_min = to_double(key, value);
    else if (key == "l_max") ep.map.l_max = to_double(key, value);
    else if (key == "p_free") ep.map.p_free = to_double(key, value);
    else if (key == "p_occ") ep.map.p_occ = to_double(key, value);
    else
      throw std::invalid_argument("unknown config key '" + key + "'");
  }

  const bool has_x = kv.count("start_x"), has_y = kv.count("start_y");
  if (has_x != has_y)
    throw std::invalid_argument("start_x and start_y must be given together");
  if (has_x) {
    Pose p;
    p.x = to_double("start_x", kv.at("start_x"));
    p.y = to_double("start_y", kv.at("start_y"));
    p.psi = kv.count("start_psi")
                ? wrap_angle(to_double("start_psi", kv.at("start_psi")))
                : 0.0;
    ep.start = p;
  } else if (kv.count("start_psi")) {
    throw std::invalid_argument("start_psi requires start_x and start_y");
  }

  if (s.strategies.empty())
    s.strategies = {Strategy::ModifiedNbv, Strategy::RhNbv,
                    Strategy::Frontier};
  return s;
}

RunSettings load_settings(const std::string& path) {
  return settings_from_map(load_config_file(path));
}

}  // namespace explore
