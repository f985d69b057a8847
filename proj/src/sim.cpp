#include "explore/sim.hpp"

#include "explore/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace explore {

namespace {

constexpr int kMaxConsecutiveFailures = 3;

struct EpisodeState {
  long tick = 0;
  double dt = 0.05;
  Pose pose;
  long last_scan_tick = -1;
  long last_plan_tick = -1;

  double now() const { return tick * dt; }
};

void append_event(EpisodeLog& log, double t, const Pose& pose,
                  double coverage, EventKind kind, double compute = 0.0) {
  log.events.push_back(EpisodeEvent{t, pose, coverage, kind, compute});
}

}  // namespace

const char* event_name(EventKind kind) {
  switch (kind) {
    case EventKind::Scan: return "scan";
    case EventKind::Plan: return "plan";
    case EventKind::Goal: return "goal";
    case EventKind::Done: return "done";
  }
  return "?";
}

bool replan_trigger(double dist_to_goal_m, bool blocked, double since_plan_s,
                    double goal_tolerance_m, double replan_period_s) {
  return dist_to_goal_m <= goal_tolerance_m || blocked ||
         since_plan_s >= replan_period_s;
}

EpisodeResult run_episode(const World& world, const EpisodeConfig& config) {
  if (config.time_budget_s < 0.0 || config.dt <= 0.0 ||
      config.scan_period_s <= 0.0 || config.done_threshold <= 0.0 ||
      config.done_threshold > 1.0)
    throw std::invalid_argument("invalid episode configuration");

  const Pose start = config.start ? *config.start : default_start(world);
  if (is_solid(world, start.position()))
    throw std::invalid_argument("episode start pose lies in a solid cell");

  GridMap map(world.geom, config.map);
  EpisodeLog log;

  Rng sensor_rng(mix_seed(config.seed, 1));
  Rng planner_rng(mix_seed(config.seed, 2));

  EpisodeState st;
  st.dt = config.dt;
  st.pose = start;

  const long scan_every =
      std::max<long>(1, std::lround(config.scan_period_s / config.dt));
  const double done_area = config.done_threshold * world.free_area_m2;

  auto do_scan = [&]() {
    const LidarScan scan =
        simulate_scan(world, st.pose, config.lidar, sensor_rng);
    integrate_scan(map, scan);
    st.last_scan_tick = st.tick;
    append_event(log, st.now(), st.pose, coverage_m2(map), EventKind::Scan);
  };

  // Recovery between failed plan cycles: turn in place so the sensor sweep
  // reaches past the field of view, scanning on the usual cadence.
  auto rotate_recovery = [&](double angle) {
    const long steps =
        std::max<long>(1, std::lround(angle / (config.psi_max * config.dt)));
    for (long i = 0; i < steps; ++i) {
      if (st.now() >= config.time_budget_s) return;
      ++st.tick;
      st.pose.psi = wrap_angle(st.pose.psi + config.psi_max * config.dt);
      if (st.tick % scan_every == 0) do_scan();
    }
  };

  std::string termination;
  int failures = 0;

  while (true) {
    if (st.now() >= config.time_budget_s) {
      termination = "time_budget";
      break;
    }
    if (st.last_scan_tick != st.tick) do_scan();
    if (coverage_m2(map) >= done_area) {
      termination = "done";
      break;
    }

    // Plan from rest: wall clock runs, the simulated clock does not.
    const auto result =
        plan(config.strategy, map, st.pose, config.planner, planner_rng);
    const double compute = result ? result->compute_seconds : 0.0;
    log.compute_time_s += compute;
    append_event(log, st.now(), st.pose, coverage_m2(map), EventKind::Plan,
                 compute);

    if (!result) {
      if (++failures >= kMaxConsecutiveFailures) {
        termination = "stuck";
        break;
      }
      rotate_recovery(2.0 * kPi / 3.0);
      st.last_scan_tick = -1;  // rescan before retrying
      continue;
    }
    append_event(log, st.now(), result->goal, coverage_m2(map),
                 EventKind::Goal);

    Costmask mask = inflate(map, config.robot_radius);
    clear_disc(mask, map.geom(), st.pose.position(), config.robot_radius);
    std::optional<NavPath> path;
    try {
      path = astar(map, mask, st.pose.position(), result->goal.position());
    } catch (const std::invalid_argument&) {
      path = std::nullopt;
    }
    if (!path) {
      if (++failures >= kMaxConsecutiveFailures) {
        termination = "stuck";
        break;
      }
      rotate_recovery(2.0 * kPi / 3.0);
      st.last_scan_tick = -1;
      continue;
    }
    failures = 0;
    st.last_plan_tick = st.tick;

    const auto traj =
        follow(*path, st.pose, config.v_max, config.psi_max, config.dt);
    const Vec2 goal_pos = result->goal.position();

    bool out_of_time = false;
    bool covered = false;
    long executed = 0;
    for (size_t i = 1; i < traj.size(); ++i) {
      ++st.tick;
      ++executed;
      st.pose = traj[i].pose;
      if (st.now() >= config.time_budget_s) {
        out_of_time = true;
        break;
      }

      bool blocked = false;
      if (st.tick % scan_every == 0) {
        do_scan();
        if (coverage_m2(map) >= done_area) {
          covered = true;
          break;
        }
        // Progress along the grid path, for the blockage check only.
        size_t nearest_cell = 0;
        double best = std::numeric_limits<double>::infinity();
        for (size_t k = 0; k < path->cells.size(); ++k) {
          const double d =
              (map.geom().cell_center(path->cells[k]) - st.pose.position())
                  .squaredNorm();
          if (d < best) {
            best = d;
            nearest_cell = k;
          }
        }
        blocked = path_blocked(map, path->cells, nearest_cell,
                               config.robot_radius);
      }

      const double dist_to_goal = (st.pose.position() - goal_pos).norm();
      const double since_plan = (st.tick - st.last_plan_tick) * config.dt;
      if (replan_trigger(dist_to_goal, blocked, since_plan,
                         config.goal_tolerance, config.replan_period_s))
        break;
    }
    if (covered) {
      termination = "done";
      break;
    }
    if (out_of_time) {
      termination = "time_budget";
      break;
    }
    if (executed == 0) {
      // Degenerate cycle (already at the goal): idle one step so the
      // simulated clock always advances between plans.
      ++st.tick;
      if (st.tick % scan_every == 0) do_scan();
    }
  }

  append_event(log, st.now(), st.pose, coverage_m2(map), EventKind::Done);
  log.termination = termination;
  log.exec_time_s = st.now();

  // Totals over the logged robot-pose rows (Goal rows are not poses).
  log.path_length_m = 0.0;
  bool have_prev = false;
  Vec2 prev = Vec2::Zero();
  for (const auto& e : log.events) {
    if (e.kind == EventKind::Goal) continue;
    const Vec2 p = e.pose.position();
    if (have_prev) log.path_length_m += (p - prev).norm();
    prev = p;
    have_prev = true;
  }

  const int seconds = static_cast<int>(std::floor(log.exec_time_s)) + 1;
  log.coverage_curve.assign(seconds, 0.0);
  {
    double cov = 0.0;
    size_t next = 0;
    for (int s = 0; s < seconds; ++s) {
      while (next < log.events.size() &&
             log.events[next].sim_time <= s + 1e-9) {
        cov = std::max(cov, log.events[next].coverage_m2);
        ++next;
      }
      log.coverage_curve[s] = cov;
    }
  }

  return EpisodeResult{std::move(log), std::move(map)};
}

void write_episode_csv(const EpisodeLog& log, std::ostream& out) {
  out << "sim_time_s,x_m,y_m,psi_rad,coverage_m2,event,compute_s\n";
  char buf[256];
  for (const auto& e : log.events) {
    std::snprintf(buf, sizeof(buf), "%.12f,%.12f,%.12f,%.12f,%.12f,%s,%.12f\n",
                  e.sim_time, e.pose.x, e.pose.y, e.pose.psi, e.coverage_m2,
                  event_name(e.kind), e.compute_s);
    out << buf;
  }
}

EpisodeLog read_episode_csv(std::istream& in) {
  EpisodeLog log;
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("empty episode CSV");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    EpisodeEvent e;
    std::string kind;
    if (!(row >> e.sim_time >> e.pose.x >> e.pose.y >> e.pose.psi >>
          e.coverage_m2 >> kind >> e.compute_s))
      throw std::invalid_argument("malformed episode CSV row: " + line);
    if (kind == "scan") e.kind = EventKind::Scan;
    else if (kind == "plan") e.kind = EventKind::Plan;
    else if (kind == "goal") e.kind = EventKind::Goal;
    else if (kind == "done") e.kind = EventKind::Done;
    else throw std::invalid_argument("unknown event kind: " + kind);
    log.events.push_back(e);
  }

  log.path_length_m = 0.0;
  bool have_prev = false;
  Vec2 prev = Vec2::Zero();
  for (const auto& e : log.events) {
    if (e.kind == EventKind::Goal) continue;
    const Vec2 p = e.pose.position();
    if (have_prev) log.path_length_m += (p - prev).norm();
    prev = p;
    have_prev = true;
    log.exec_time_s = e.sim_time;
    if (e.kind == EventKind::Plan) log.compute_time_s += e.compute_s;
  }
  return log;
}

}  // namespace explore
