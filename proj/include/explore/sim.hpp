#pragma once

#include "explore/grid_map.hpp"
#include "explore/nav.hpp"
#include "explore/planner.hpp"
#include "explore/sensor.hpp"
#include "explore/world.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace explore {

struct EpisodeConfig {
  Strategy strategy = Strategy::ModifiedNbv;
  PlannerParams planner;
  LidarSpec lidar;
  MapParams map;
  double v_max = 0.3;
  double psi_max = 1.0;
  double dt = 0.05;              // kinematic step, s
  double time_budget_s = 900.0;  // simulated
  double scan_period_s = 0.2;    // simulated time between scans
  double done_threshold = 0.99;  // fraction of world free area
  double robot_radius = 0.2;
  double goal_tolerance = 0.3;   // goal-reached replan trigger, m
  double replan_period_s = 30.0; // periodic replan trigger
  uint64_t seed = 0;
  std::optional<Pose> start;     // world default start when unset
};

enum class EventKind : uint8_t { Scan, Plan, Goal, Done };

const char* event_name(EventKind kind);

/// One logged event. Plan and Done rows carry the robot pose; Goal rows
/// carry the goal pose. compute_s is wall-clock planning time and is the
/// only non-deterministic field.
struct EpisodeEvent {
  double sim_time = 0.0;
  Pose pose;
  double coverage_m2 = 0.0;
  EventKind kind = EventKind::Scan;
  double compute_s = 0.0;
};

struct EpisodeLog {
  std::vector<EpisodeEvent> events;
  double path_length_m = 0.0;  // polyline over robot-pose rows
  double exec_time_s = 0.0;    // simulated
  double compute_time_s = 0.0; // wall clock spent planning
  std::vector<double> coverage_curve;  // 1 s simulated resolution
  std::string termination;     // done | time_budget | stuck
};

struct EpisodeResult {
  EpisodeLog log;
  GridMap map;
};

/// Runs one sense-plan-navigate episode. The simulated clock advances only
/// with motion; planning is measured in wall-clock time and reported
/// separately. Terminates on coverage, on the time budget, or after three
/// consecutive planner/navigation failures.
EpisodeResult run_episode(const World& world, const EpisodeConfig& config);

/// Replan when the goal is reached, the remaining path is blocked, or the
/// last plan is older than replan_period_s.
bool replan_trigger(double dist_to_goal_m, bool blocked,
                    double since_plan_s, double goal_tolerance_m,
                    double replan_period_s);

/// CSV schema: sim_time_s,x_m,y_m,psi_rad,coverage_m2,event,compute_s
void write_episode_csv(const EpisodeLog& log, std::ostream& out);
EpisodeLog read_episode_csv(std::istream& in);

}  // namespace explore
