#include "explore/harness.hpp"

#include "explore/random.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace explore {

namespace {

namespace fs = std::filesystem;

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

int strategy_rank(Strategy s) {
  switch (s) {
    case Strategy::ModifiedNbv: return 0;
    case Strategy::RhNbv: return 1;
    case Strategy::Frontier: return 2;
  }
  return 3;
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd out;
  if (xs.empty()) {
    out.mean = out.std = nan_value();
    return out;
  }
  for (double x : xs) out.mean += x;
  out.mean /= xs.size();
  if (xs.size() == 1) return out;  // sample std of a single value is 0
  double ss = 0.0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  out.std = std::sqrt(ss / (xs.size() - 1));
  return out;
}

std::string csv_number(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", x);
  return buf;
}

}  // namespace

uint64_t episode_seed(uint64_t base_seed, Strategy strategy, int episode) {
  return mix_seed(mix_seed(base_seed, strategy_rank(strategy) + 1),
                  static_cast<uint64_t>(episode));
}

ThresholdCrossing crossing(const EpisodeLog& log, double threshold_m2) {
  ThresholdCrossing out;
  double path = 0.0, comp = 0.0;
  bool have_prev = false;
  Vec2 prev = Vec2::Zero();
  for (const auto& e : log.events) {
    if (e.kind != EventKind::Goal) {
      const Vec2 p = e.pose.position();
      if (have_prev) path += (p - prev).norm();
      prev = p;
      have_prev = true;
    }
    if (e.kind == EventKind::Plan) comp += e.compute_s;
    if (e.coverage_m2 >= threshold_m2) {
      out.reached = true;
      out.path_m = path;
      out.exec_s = e.sim_time;
      out.comp_s = comp;
      return out;
    }
  }
  return out;
}

StatRow make_stat_row(Strategy strategy, double threshold_m2,
                      const std::vector<ThresholdCrossing>& crossings) {
  StatRow row;
  row.strategy = strategy;
  row.threshold_m2 = threshold_m2;

  std::vector<double> paths, execs, comps;
  for (const auto& c : crossings) {
    if (!c.reached) continue;
    paths.push_back(c.path_m);
    execs.push_back(c.exec_s);
    comps.push_back(c.comp_s);
  }
  row.successful_iterations = static_cast<int>(paths.size());

  const auto p = mean_std(paths), e = mean_std(execs), c = mean_std(comps);
  row.path_mean = p.mean;
  row.path_std = p.std;
  row.exec_mean = e.mean;
  row.exec_std = e.std;
  row.comp_mean = c.mean;
  row.comp_std = c.std;
  row.avg_speed = (row.successful_iterations > 0 && e.mean > 0.0)
                      ? std::round(p.mean / e.mean * 100.0) / 100.0
                      : nan_value();
  return row;
}

void write_stats_csv(const std::vector<StatRow>& rows, std::ostream& out) {
  out << "strategy,threshold_m2,successful_iterations,path_mean_m,path_std_m,"
         "exec_mean_s,exec_std_s,comp_mean_s,comp_std_s,avg_speed_mps\n";
  for (const auto& r : rows) {
    out << strategy_name(r.strategy) << "," << csv_number(r.threshold_m2)
        << "," << r.successful_iterations << "," << csv_number(r.path_mean)
        << "," << csv_number(r.path_std) << "," << csv_number(r.exec_mean)
        << "," << csv_number(r.exec_std) << "," << csv_number(r.comp_mean)
        << "," << csv_number(r.comp_std) << "," << csv_number(r.avg_speed)
        << "\n";
  }
}

CampaignResult run_campaign(const RunSettings& settings,
                            unsigned parallelism) {
  if (settings.episodes_per_strategy < 1)
    throw std::invalid_argument("campaign needs at least one episode");
  if (settings.strategies.empty())
    throw std::invalid_argument("campaign needs at least one strategy");

  // Worlds: one loaded file, or mazes generated from seeds (round-robin
  // across episodes).
  std::vector<World> worlds;
  if (!settings.world_path.empty()) {
    worlds.push_back(load_world(settings.world_path));
  } else if (!settings.world_seeds.empty()) {
    MazeOptions opts;
    opts.corridor_m = settings.gen_corridor_m;
    opts.wall_m = settings.gen_wall_m;
    opts.braid = settings.gen_braid;
    for (uint64_t seed : settings.world_seeds)
      worlds.push_back(generate_maze(settings.gen_size_m, settings.gen_size_m,
                                     settings.gen_resolution, seed, opts));
  } else {
    throw std::invalid_argument("campaign spec needs 'world' or 'world_seeds'");
  }

  // Per-world absolute thresholds; fractional thresholds resolve against
  // each world's free area.
  std::vector<std::vector<double>> thresholds_by_world;
  size_t n_thresholds = 0;
  for (const auto& w : worlds) {
    std::vector<double> t = settings.thresholds_m2;
    for (double f : settings.thresholds_frac) t.push_back(f * w.free_area_m2);
    if (t.empty()) t.push_back(settings.episode.done_threshold * w.free_area_m2);
    std::sort(t.begin(), t.end());
    for (double x : t) {
      if (x <= 0.0 || x > w.free_area_m2)
        throw std::invalid_argument(
            "coverage threshold outside (0, free_area] for world " + w.name);
    }
    n_thresholds = t.size();
    thresholds_by_world.push_back(std::move(t));
  }
  for (const auto& t : thresholds_by_world) {
    if (t.size() != n_thresholds)
      throw std::invalid_argument("threshold counts differ across worlds");
  }

  fs::create_directories(settings.out_dir);

  struct Task {
    size_t strategy_index;
    int episode;
  };
  std::vector<Task> tasks;
  for (size_t s = 0; s < settings.strategies.size(); ++s)
    for (int i = 0; i < settings.episodes_per_strategy; ++i)
      tasks.push_back({s, i});

  CampaignResult result;
  result.logs.assign(settings.strategies.size(), {});
  for (auto& v : result.logs)
    v.resize(settings.episodes_per_strategy);

  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mutex;

  auto worker = [&]() {
    while (!failed) {
      const size_t k = next.fetch_add(1);
      if (k >= tasks.size()) return;
      const Task task = tasks[k];
      const Strategy strategy = settings.strategies[task.strategy_index];
      const World& world = worlds[task.episode % worlds.size()];
      EpisodeConfig config = settings.episode;
      config.strategy = strategy;
      config.seed = episode_seed(settings.base_seed, strategy, task.episode);
      try {
        result.logs[task.strategy_index][task.episode] =
            run_episode(world, config).log;
      } catch (const std::exception& ex) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        failed = true;
        failure = ex.what();
      }
    }
  };

  unsigned n_workers = parallelism;
  if (n_workers == 0) {
    n_workers = std::thread::hardware_concurrency();
    if (n_workers == 0) n_workers = 1;
  }
  n_workers = std::min<unsigned>(n_workers, tasks.size());
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failed) throw std::runtime_error("campaign episode failed: " + failure);

  // Single-threaded collection keeps file output deterministic.
  for (size_t s = 0; s < settings.strategies.size(); ++s) {
    for (int i = 0; i < settings.episodes_per_strategy; ++i) {
      const std::string path =
          (fs::path(settings.out_dir) /
           (strategy_name(settings.strategies[s]) + "_ep" +
            std::to_string(i) + ".csv"))
              .string();
      std::ofstream out(path);
      if (!out) throw std::runtime_error("cannot write " + path);
      write_episode_csv(result.logs[s][i], out);
      result.episode_csv_paths.push_back(path);
    }
  }

  for (size_t s = 0; s < settings.strategies.size(); ++s) {
    for (size_t t = 0; t < n_thresholds; ++t) {
      std::vector<ThresholdCrossing> crossings;
      for (int i = 0; i < settings.episodes_per_strategy; ++i) {
        const auto& thresholds = thresholds_by_world[i % worlds.size()];
        crossings.push_back(crossing(result.logs[s][i], thresholds[t]));
      }
      result.rows.push_back(make_stat_row(settings.strategies[s],
                                          thresholds_by_world[0][t],
                                          crossings));
    }
  }

  result.stats_csv_path =
      (fs::path(settings.out_dir) / "stats.csv").string();
  std::ofstream stats(result.stats_csv_path);
  if (!stats) throw std::runtime_error("cannot write stats.csv");
  write_stats_csv(result.rows, stats);
  return result;
}

RunArtifacts run_single(const World& world, const EpisodeConfig& config,
                        const std::string& out_dir) {
  fs::create_directories(out_dir);
  auto episode = run_episode(world, config);

  RunArtifacts artifacts;
  artifacts.log = std::move(episode.log);

  const std::string stem = world.name + "_" + strategy_name(config.strategy) +
                           "_seed" + std::to_string(config.seed);
  artifacts.csv_path = (fs::path(out_dir) / (stem + ".csv")).string();
  {
    std::ofstream out(artifacts.csv_path);
    if (!out) throw std::runtime_error("cannot write " + artifacts.csv_path);
    write_episode_csv(artifacts.log, out);
  }

  artifacts.map_path = (fs::path(out_dir) / (stem + ".pgm")).string();
  save_pgm(episode.map, artifacts.map_path);

  artifacts.image_path = (fs::path(out_dir) / (stem + ".ppm")).string();
  save_ppm(render_episode(artifacts.log, to_map_image(episode.map)),
           artifacts.image_path);
  return artifacts;
}

}  // namespace explore
