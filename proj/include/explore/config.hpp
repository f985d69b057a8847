#pragma once

#include "explore/sim.hpp"

#include <map>
#include <string>
#include <vector>

namespace explore {

/// Flat `key = value` settings file. '#' starts a comment; values may be
/// space-separated lists. Unknown keys are rejected.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> load_config_file(const std::string& path);

struct RunSettings {
  EpisodeConfig episode;

  // campaign-only fields
  std::string world_path;
  std::vector<uint64_t> world_seeds;  // generated worlds instead of a file
  double gen_size_m = 20.0;
  double gen_resolution = 0.05;
  double gen_corridor_m = 1.0;
  double gen_wall_m = 0.2;
  double gen_braid = 0.0;
  std::vector<Strategy> strategies;
  int episodes_per_strategy = 20;
  std::vector<double> thresholds_m2;    // absolute coverage thresholds
  std::vector<double> thresholds_frac;  // resolved against world free area
  uint64_t base_seed = 1;
  std::string out_dir = "out";
};

/// Applies parsed keys onto defaults; throws std::invalid_argument on
/// unknown keys or unparseable values.
RunSettings settings_from_map(const std::map<std::string, std::string>& kv);
RunSettings load_settings(const std::string& path);

}  // namespace explore
