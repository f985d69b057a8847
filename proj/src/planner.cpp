#include "explore/planner.hpp"

#include "explore/raycast.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

namespace explore {

namespace {

using ClassArray = Eigen::Array<uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

constexpr int kSampleBudget = 100000;

double logit(double p) { return std::log(p / (1.0 - p)); }

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

int visible_unknown_impl(const GridGeometry& geom, const ClassArray& cls,
                         const Vec2& node, double range) {
  const CellIndex center = geom.cell_at(node);
  const int radius_cells =
      static_cast<int>(std::ceil(range / geom.resolution)) + 1;
  const int c0 = std::max(0, center.x() - radius_cells);
  const int c1 = std::min(geom.cols - 1, center.x() + radius_cells);
  const int r0 = std::max(0, center.y() - radius_cells);
  const int r1 = std::min(geom.rows - 1, center.y() + radius_cells);
  const double range2 = range * range;
  const auto unknown = static_cast<uint8_t>(CellClass::Unknown);
  const auto occupied = static_cast<uint8_t>(CellClass::Occupied);

  int count = 0;
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      if (cls(r, c) != unknown) continue;
      const Vec2 target = geom.cell_center(CellIndex(c, r));
      if ((target - node).squaredNorm() > range2) continue;
      bool visible = true;
      walk_cells(geom, node, target, [&](const CellIndex& cc, double) {
        if (cls(cc.y(), cc.x()) == occupied) {
          visible = false;
          return false;
        }
        return true;
      });
      if (visible) ++count;
    }
  }
  return count;
}

/// Unknown-classified cells whose center lies within `radius` of `p`.
int unknown_count_near(const GridMap& map, const Vec2& p, double radius) {
  const auto& geom = map.geom();
  const int rc = static_cast<int>(std::ceil(radius / geom.resolution)) + 1;
  const int cc = static_cast<int>(std::floor((p.x() - geom.origin.x()) /
                                             geom.resolution));
  const int cr = static_cast<int>(std::floor((p.y() - geom.origin.y()) /
                                             geom.resolution));
  const double radius2 = radius * radius;
  int count = 0;
  for (int r = std::max(0, cr - rc); r <= std::min(geom.rows - 1, cr + rc);
       ++r) {
    for (int c = std::max(0, cc - rc); c <= std::min(geom.cols - 1, cc + rc);
         ++c) {
      const CellIndex cell(c, r);
      if ((geom.cell_center(cell) - p).squaredNorm() > radius2) continue;
      if (classify(map, cell) == CellClass::Unknown) ++count;
    }
  }
  return count;
}

struct Grown {
  std::vector<RrtNode> tree;
  int attempts = 0;
  int accepted = 0;
  int best = 0;  // stays at the root until some vertex exceeds gain 0
  double best_gain = 0.0;
  int best_frontier = -1;  // argmax gain among frontier vertices
  double best_frontier_gain = 0.0;
  bool last_is_frontier = false;
  std::vector<int> frontier_nodes;
};

/// Shared growth loop: sample, nearest, steer, insert. Rejected samples
/// consume an attempt without inserting a vertex. `gain_of` sees the tree
/// built so far (for the parent's accumulated gain); `done` is evaluated
/// before every attempt.
template <class GainFn, class DoneFn>
Grown grow_tree(const GridMap& map, const Pose& pose,
                const PlannerParams& params, Rng& rng, GainFn&& gain_of,
                DoneFn&& done) {
  Grown g;
  g.tree.push_back(RrtNode{pose.position(), -1, 0.0, false});

  while (g.attempts < params.n_abs_max && !done(g)) {
    ++g.attempts;
    const auto x_rand = sample_known_free(map, rng);
    if (!x_rand) break;

    const int near = nearest_neighbor(g.tree, *x_rand);
    const auto steered = steer_overshoot(map, g.tree[near].position, *x_rand,
                                         params.epsilon, params.alpha);
    Vec2 x_new;
    if (steered.kind == SteerOutcome::Accepted) {
      x_new = steered.point;
    } else if (steered.kind == SteerOutcome::Blocked && params.strict_eq2) {
      x_new = g.tree[near].position;  // literal duplicate-vertex behavior
    } else {
      continue;
    }

    const double edge = (x_new - g.tree[near].position).norm();
    RrtNode node;
    node.position = x_new;
    node.parent = near;
    node.gain = gain_of(g.tree, x_new, near, edge);
    const auto cell = map.geom().try_cell_at(x_new);
    node.is_frontier_node = cell && is_frontier(map, *cell);

    g.tree.push_back(node);
    ++g.accepted;
    g.last_is_frontier = node.is_frontier_node;
    const int id = static_cast<int>(g.tree.size()) - 1;
    if (node.is_frontier_node) {
      g.frontier_nodes.push_back(id);
      if (node.gain > g.best_frontier_gain || g.best_frontier < 0) {
        g.best_frontier_gain = node.gain;
        g.best_frontier = id;
      }
    }
    if (node.gain > g.best_gain) {
      g.best_gain = node.gain;
      g.best = id;
    }
  }
  return g;
}

/// Traces the best vertex back to depth 1; the goal is that first edge's
/// endpoint with heading along the edge. With prefer_frontier the best
/// frontier vertex wins when one exists; otherwise the plain argmax.
std::optional<PlanResult> extract_first_edge(const Pose& pose, Grown&& g,
                                             bool prefer_frontier) {
  if (g.accepted == 0) return std::nullopt;
  int best = (prefer_frontier && g.best_frontier >= 0) ? g.best_frontier
                                                       : g.best;
  if (best == 0) best = 1;  // all gains zero: earliest accepted vertex

  int n = best;
  while (g.tree[n].parent > 0) n = g.tree[n].parent;

  const Vec2 root = g.tree[0].position;
  const Vec2 target = g.tree[n].position;
  const double heading =
      (target - root).norm() > 0.0
          ? std::atan2(target.y() - root.y(), target.x() - root.x())
          : pose.psi;

  PlanResult result;
  result.goal = make_pose(target.x(), target.y(), heading);
  result.best_gain = g.tree[best].gain;
  result.iterations_used = g.attempts;
  result.best_node = best;
  result.goal_node = n;
  result.tree = std::move(g.tree);
  return result;
}

}  // namespace

std::string strategy_name(Strategy s) {
  switch (s) {
    case Strategy::ModifiedNbv: return "nbv";
    case Strategy::RhNbv: return "rh-nbv";
    case Strategy::Frontier: return "frontier";
  }
  return "?";
}

std::optional<Strategy> parse_strategy(const std::string& name) {
  if (name == "nbv" || name == "ours" || name == "modified-nbv")
    return Strategy::ModifiedNbv;
  if (name == "rh-nbv" || name == "rhnbv") return Strategy::RhNbv;
  if (name == "frontier") return Strategy::Frontier;
  return std::nullopt;
}

std::optional<Vec2> sample_known_free(const GridMap& map, Rng& rng) {
  if (map.known_count() == 0) return std::nullopt;
  const auto& geom = map.geom();
  const auto& known = map.known_grid();
  const auto& lo = map.logodds_grid();
  const double l_free_thr = logit(map.params().p_free);
  for (int i = 0; i < kSampleBudget; ++i) {
    const Vec2 p = geom.origin + Vec2(rng.uniform01() * geom.width_m(),
                                      rng.uniform01() * geom.height_m());
    const auto cell = geom.try_cell_at(p);
    if (!cell) continue;
    if (known(cell->y(), cell->x()) && lo(cell->y(), cell->x()) < l_free_thr)
      return p;
  }
  return std::nullopt;
}

int nearest_neighbor(const std::vector<RrtNode>& tree, const Vec2& point) {
  int best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < tree.size(); ++i) {
    const double d2 = (tree[i].position - point).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = static_cast<int>(i);
    }
  }
  return best;
}

SteerOutcome steer_overshoot(const GridMap& map, const Vec2& x_near,
                             const Vec2& x_rand, double epsilon,
                             double alpha) {
  const Vec2 d = x_rand - x_near;
  const double dist = d.norm();
  if (dist <= 0.0) return {SteerOutcome::Degenerate, Vec2::Zero()};

  const Vec2 u = d / dist;
  const Vec2 candidate = dist <= epsilon ? x_rand : Vec2(x_near + epsilon * u);
  const Vec2 overshoot = candidate + alpha * u;
  if (!map.geom().contains(overshoot))
    return {SteerOutcome::Blocked, Vec2::Zero()};

  // Literal obstruction test: a known cell at probability >= 0.5 blocks;
  // unknown cells do not, so branches can end on frontiers. The cell
  // holding x_near itself is exempt: it hosts an already-validated vertex
  // (the root is the robot's physical location).
  bool blocked = false;
  const auto& known = map.known_grid();
  const auto& lo = map.logodds_grid();
  walk_cells(map.geom(), x_near, overshoot, [&](const CellIndex& c, double t) {
    if (t == 0.0) return true;
    if (known(c.y(), c.x()) && lo(c.y(), c.x()) >= 0.0) {
      blocked = true;
      return false;
    }
    return true;
  });
  if (blocked) return {SteerOutcome::Blocked, Vec2::Zero()};
  return {SteerOutcome::Accepted, candidate};
}

double cell_gain(const GridMap& map, const CellIndex& center, double gamma,
                 double r_gain_max, int n_samples, Rng& rng,
                 bool clamp_occupied) {
  const auto& geom = map.geom();
  const Vec2 c0 = geom.cell_center(center);

  double sum = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    const double radius = r_gain_max * std::sqrt(rng.uniform01());
    const double theta = 2.0 * kPi * rng.uniform01();
    const Vec2 p = c0 + radius * Vec2(std::cos(theta), std::sin(theta));
    const auto cell = geom.try_cell_at(p);
    double prob = 0.5;  // out-of-map and unobserved cells
    if (cell && map.known(*cell)) {
      if (clamp_occupied && classify(map, *cell) == CellClass::Occupied)
        continue;
      prob = probability(map, *cell);
    }
    sum += std::exp(-gamma * (1.0 - 2.0 * prob));
  }
  return sum;
}

double node_gain(double g_parent, double big_g, double edge_length,
                 double lambda) {
  return g_parent + big_g * std::exp(-lambda * edge_length);
}

int visible_unknown_count(const GridMap& map, const Vec2& node, double range) {
  return visible_unknown_impl(map.geom(), class_grid(map), node, range);
}

std::optional<PlanResult> plan_modified_nbv(const GridMap& map,
                                            const Pose& pose,
                                            const PlannerParams& params,
                                            Rng& rng) {
  const auto t0 = std::chrono::steady_clock::now();

  auto gain = [&](const std::vector<RrtNode>& tree, const Vec2& x_new,
                  int parent, double edge) {
    const auto cell = map.geom().try_cell_at(x_new);
    const double big_g =
        cell ? cell_gain(map, *cell, params.gamma, params.r_gain_max,
                         params.n_gain_samples, rng,
                         params.clamp_occupied_gain)
             : 0.0;
    return node_gain(tree[parent].gain, big_g, edge, params.lambda);
  };
  // Sampling extends past n_max until some branch endpoint lands on a
  // frontier; those endpoints are the candidates the utility ranks.
  auto done = [&](const Grown& g) {
    return g.accepted >= params.n_max && !g.frontier_nodes.empty();
  };

  auto result = extract_first_edge(
      pose, grow_tree(map, pose, params, rng, gain, done), true);
  if (result) result->compute_seconds = seconds_since(t0);
  return result;
}

std::optional<PlanResult> plan_rh_nbv(const GridMap& map, const Pose& pose,
                                      const PlannerParams& params, Rng& rng) {
  const auto t0 = std::chrono::steady_clock::now();
  const ClassArray cls = class_grid(map);  // frozen for this call

  auto gain = [&](const std::vector<RrtNode>& tree, const Vec2& x_new,
                  int parent, double edge) {
    const int count =
        visible_unknown_impl(map.geom(), cls, x_new, params.sensor_range);
    return node_gain(tree[parent].gain, count, edge, params.lambda);
  };
  auto done = [&](const Grown& g) {
    return g.accepted >= params.n_max && g.best_gain > 0.0;
  };

  auto result = extract_first_edge(
      pose, grow_tree(map, pose, params, rng, gain, done), false);
  if (result) result->compute_seconds = seconds_since(t0);
  return result;
}

std::optional<PlanResult> plan_frontier(const GridMap& map, const Pose& pose,
                                        const PlannerParams& params,
                                        Rng& rng) {
  const auto t0 = std::chrono::steady_clock::now();

  auto gain = [](const std::vector<RrtNode>&, const Vec2&, int, double) {
    return 0.0;
  };
  auto done = [&](const Grown& g) {
    return g.accepted >= params.n_max && !g.frontier_nodes.empty();
  };

  Grown g = grow_tree(map, pose, params, rng, gain, done);
  if (g.frontier_nodes.empty()) return std::nullopt;

  // Cluster detected frontier vertices by 0.5 m grid bucketing; pick the
  // centroid with the best unknown-mass-versus-distance utility.
  constexpr double kBucket = 0.5;
  std::map<std::pair<int, int>, std::vector<int>> buckets;
  for (int id : g.frontier_nodes) {
    const Vec2& p = g.tree[id].position;
    buckets[{static_cast<int>(std::floor(p.x() / kBucket)),
             static_cast<int>(std::floor(p.y() / kBucket))}]
        .push_back(id);
  }

  const Vec2 here = pose.position();
  double best_score = -1.0;
  Vec2 best_centroid = Vec2::Zero();
  int best_member = 0;
  for (const auto& [key, members] : buckets) {
    Vec2 centroid = Vec2::Zero();
    for (int id : members) centroid += g.tree[id].position;
    centroid /= static_cast<double>(members.size());
    const int unknown = unknown_count_near(map, centroid, params.r_gain_max);
    const double score =
        unknown * std::exp(-params.lambda * (centroid - here).norm());
    if (score > best_score) {
      best_score = score;
      best_centroid = centroid;
      best_member = members.front();
    }
  }

  const double heading =
      (best_centroid - here).norm() > 0.0
          ? std::atan2(best_centroid.y() - here.y(),
                       best_centroid.x() - here.x())
          : pose.psi;

  PlanResult result;
  result.goal = make_pose(best_centroid.x(), best_centroid.y(), heading);
  result.best_gain = best_score;
  result.iterations_used = g.attempts;
  result.best_node = best_member;
  result.goal_node = -1;
  result.tree = std::move(g.tree);
  result.compute_seconds = seconds_since(t0);
  return result;
}

std::optional<PlanResult> plan(Strategy strategy, const GridMap& map,
                               const Pose& pose, const PlannerParams& params,
                               Rng& rng) {
  switch (strategy) {
    case Strategy::ModifiedNbv:
      return plan_modified_nbv(map, pose, params, rng);
    case Strategy::RhNbv:
      return plan_rh_nbv(map, pose, params, rng);
    case Strategy::Frontier:
      return plan_frontier(map, pose, params, rng);
  }
  return std::nullopt;
}

void write_tree(const PlanResult& result, std::ostream& out) {
  out.precision(12);
  for (size_t i = 0; i < result.tree.size(); ++i) {
    const auto& n = result.tree[i];
    out << i << " " << n.parent << " " << n.position.x() << " "
        << n.position.y() << " " << n.gain << " "
        << (n.is_frontier_node ? 1 : 0) << "\n";
  }
}

}  // namespace explore
