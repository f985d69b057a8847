#pragma once

#include "explore/config.hpp"
#include "explore/render.hpp"
#include "explore/sim.hpp"
#include "explore/world.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace explore {

/// Stable per-episode seed derived from the campaign base seed.
uint64_t episode_seed(uint64_t base_seed, Strategy strategy, int episode);

/// Cumulative path, simulated time and planning compute at the first
/// logged row whose coverage reaches the threshold.
struct ThresholdCrossing {
  bool reached = false;
  double path_m = 0.0;
  double exec_s = 0.0;
  double comp_s = 0.0;
};

ThresholdCrossing crossing(const EpisodeLog& log, double threshold_m2);

/// One statistics row per (strategy, threshold). Means and sample standard
/// deviations (n-1) are over successful episodes only; rows with no
/// successes report NaN. Average speed is mean path over mean time,
/// rounded to 2 decimals.
struct StatRow {
  Strategy strategy = Strategy::ModifiedNbv;
  double threshold_m2 = 0.0;
  int successful_iterations = 0;
  double path_mean = 0.0, path_std = 0.0;
  double exec_mean = 0.0, exec_std = 0.0;
  double comp_mean = 0.0, comp_std = 0.0;
  double avg_speed = 0.0;
};

StatRow make_stat_row(Strategy strategy, double threshold_m2,
                      const std::vector<ThresholdCrossing>& crossings);

void write_stats_csv(const std::vector<StatRow>& rows, std::ostream& out);

struct CampaignResult {
  std::vector<StatRow> rows;
  // logs[strategy index as listed in the spec][episode index]
  std::vector<std::vector<EpisodeLog>> logs;
  std::vector<std::string> episode_csv_paths;
  std::string stats_csv_path;
};

/// Runs episodes_per_strategy seeded episodes per strategy in a worker
/// pool, writes one CSV per episode plus a stats CSV, and returns the
/// statistics. Throws std::invalid_argument on inconsistent specs (for
/// example a threshold above the world's free area).
CampaignResult run_campaign(const RunSettings& settings,
                            unsigned parallelism = 0);

/// Single-episode convenience used by the CLI: runs, then writes the
/// episode CSV, the final map (PGM + sidecar) and a rendered PPM into
/// out_dir.
struct RunArtifacts {
  EpisodeLog log;
  std::string csv_path;
  std::string map_path;
  std::string image_path;
};
RunArtifacts run_single(const World& world, const EpisodeConfig& config,
                        const std::string& out_dir);

}  // namespace explore
