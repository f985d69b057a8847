#include "explore/config.hpp"
#include "explore/harness.hpp"
#include "explore/render.hpp"
#include "explore/sim.hpp"
#include "explore/world.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

int cmd_run(const std::string& world_path, const std::string& strategy,
            uint64_t seed, double budget, const std::string& out_dir,
            const std::string& config_path) {
  explore::RunSettings settings;
  if (!config_path.empty()) settings = explore::load_settings(config_path);

  const auto st = explore::parse_strategy(strategy);
  if (!st) throw std::invalid_argument("unknown strategy '" + strategy + "'");
  settings.episode.strategy = *st;
  settings.episode.seed = seed;
  if (budget >= 0.0) settings.episode.time_budget_s = budget;

  const explore::World world = explore::load_world(world_path);
  const auto artifacts =
      explore::run_single(world, settings.episode, out_dir);
  std::cout << "episode: " << artifacts.log.termination
            << " coverage=" << artifacts.log.events.back().coverage_m2
            << " m^2, path=" << artifacts.log.path_length_m
            << " m, exec=" << artifacts.log.exec_time_s
            << " s, compute=" << artifacts.log.compute_time_s << " s\n";
  std::cout << "wrote " << artifacts.csv_path << "\n";
  std::cout << "wrote " << artifacts.map_path << " (+.meta)\n";
  std::cout << "wrote " << artifacts.image_path << "\n";
  return 0;
}

int cmd_campaign(const std::string& spec_path, unsigned jobs) {
  const explore::RunSettings settings = explore::load_settings(spec_path);
  const auto result = explore::run_campaign(settings, jobs);
  std::cout << "wrote " << result.episode_csv_paths.size()
            << " episode CSVs and " << result.stats_csv_path << "\n";
  std::ifstream stats(result.stats_csv_path);
  std::cout << stats.rdbuf();
  return 0;
}

int cmd_render(const std::string& log_path, const std::string& map_path,
               const std::string& out_path) {
  std::ifstream in(log_path);
  if (!in) throw std::invalid_argument("cannot open log file: " + log_path);
  const explore::EpisodeLog log = explore::read_episode_csv(in);
  const explore::MapImage base = explore::load_pgm(map_path);
  explore::save_ppm(explore::render_episode(log, base), out_path);
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_genmaze(double size, uint64_t seed, const std::string& out_path,
                double resolution, double corridor, double wall,
                double braid) {
  explore::MazeOptions opts;
  opts.corridor_m = corridor;
  opts.wall_m = wall;
  opts.braid = braid;
  const explore::World world =
      explore::generate_maze(size, size, resolution, seed, opts);
  explore::save_world(world, out_path);
  std::cout << "wrote " << out_path << " (free area " << world.free_area_m2
            << " m^2)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D autonomous-exploration benchmark"};
  app.require_subcommand(1);

  std::string world_path, strategy = "nbv", out_dir = "out", config_path;
  uint64_t seed = 0;
  double budget = -1.0;
  auto* run = app.add_subcommand("run", "run a single exploration episode");
  run->add_option("--world", world_path, "world file")->required();
  run->add_option("--strategy", strategy, "nbv | rh-nbv | frontier");
  run->add_option("--seed", seed, "episode seed");
  run->add_option("--budget", budget, "simulated time budget, s");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--config", config_path, "settings file with defaults");

  std::string spec_path;
  unsigned jobs = 0;
  auto* campaign =
      app.add_subcommand("campaign", "run a multi-episode benchmark");
  campaign->add_option("--spec", spec_path, "campaign settings file")
      ->required();
  campaign->add_option("--jobs", jobs, "worker threads (default: all cores)");

  std::string log_path, map_path, image_path;
  auto* render = app.add_subcommand("render", "draw an episode over its map");
  render->add_option("--log", log_path, "episode CSV")->required();
  render->add_option("--map", map_path, "PGM map with .meta sidecar")
      ->required();
  render->add_option("--out", image_path, "output PPM")->required();

  double size = 20.0, resolution = 0.05, corridor = 1.0, wall = 0.2,
         braid = 0.0;
  uint64_t maze_seed = 1;
  std::string maze_out = "maze.txt";
  auto* genmaze = app.add_subcommand("genmaze", "generate a maze world");
  genmaze->add_option("--size", size, "square side length, m");
  genmaze->add_option("--seed", maze_seed, "maze seed");
  genmaze->add_option("--out", maze_out, "output world file");
  genmaze->add_option("--resolution", resolution, "meters per cell");
  genmaze->add_option("--corridor", corridor, "corridor width, m");
  genmaze->add_option("--wall", wall, "wall thickness, m");
  genmaze->add_option("--braid", braid, "loop fraction in [0,1]");

  try {
    app.parse(argc, argv);
    if (run->parsed())
      return cmd_run(world_path, strategy, seed, budget, out_dir, config_path);
    if (campaign->parsed()) return cmd_campaign(spec_path, jobs);
    if (render->parsed()) return cmd_render(log_path, map_path, image_path);
    if (genmaze->parsed())
      return cmd_genmaze(size, maze_seed, maze_out, resolution, corridor,
                         wall, braid);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
