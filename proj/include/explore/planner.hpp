#pragma once

#include "explore/geometry.hpp"
#include "explore/grid_map.hpp"
#include "explore/random.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace explore {

enum class Strategy { ModifiedNbv, RhNbv, Frontier };

std::string strategy_name(Strategy s);
std::optional<Strategy> parse_strategy(const std::string& name);

struct PlannerParams {
  double epsilon = 1.5;      // max tree edge length, m
  double alpha = 0.3;        // collision overshoot beyond a new vertex, m
  int n_max = 15;            // accepted insertions before termination checks
  double lambda = 0.5;       // distance discount, 1/m
  double gamma = 4.0;        // occupancy-probability weight
  double r_gain_max = 0.3;   // gain sampling disc radius, m
  int n_gain_samples = 20;   // terms in the sampled gain sum
  int n_abs_max = 500;       // hard cap on sampling attempts
  double sensor_range = 8.0; // visibility radius for the receding-horizon gain
  bool clamp_occupied_gain = false;  // zero gain contributions of occupied cells
  bool strict_eq2 = false;   // blocked steering yields a duplicate vertex
                             // instead of a rejection
};

struct RrtNode {
  Vec2 position = Vec2::Zero();
  int parent = -1;  // -1 marks the root
  double gain = 0.0;
  bool is_frontier_node = false;
};

struct PlanResult {
  Pose goal;                   // next view to drive to
  std::vector<RrtNode> tree;   // full tree for rendering
  double best_gain = 0.0;
  int iterations_used = 0;     // sampling attempts consumed
  double compute_seconds = 0.0;
  int best_node = 0;           // argmax-gain vertex (or winning frontier node)
  int goal_node = -1;          // depth-1 vertex the goal came from; -1 when
                               // the goal is a frontier cluster centroid
};

/// Uniform draw over Free-classified cells via rejection sampling.
/// Returns nullopt when the map has no free cell or the 1e5-draw budget
/// runs out.
std::optional<Vec2> sample_known_free(const GridMap& map, Rng& rng);

/// Index of the tree vertex closest to `point`; ties break to the lowest id.
int nearest_neighbor(const std::vector<RrtNode>& tree, const Vec2& point);

struct SteerOutcome {
  enum Kind { Accepted, Blocked, Degenerate } kind = Degenerate;
  Vec2 point = Vec2::Zero();
};

/// Moves from x_near toward x_rand by at most epsilon, then collision-checks
/// the segment extended by alpha. Cells that are known and at least 0.5
/// probable block; unknown cells do not, so edges may end at frontiers.
SteerOutcome steer_overshoot(const GridMap& map, const Vec2& x_near,
                             const Vec2& x_rand, double epsilon, double alpha);

/// Sampled occupancy-weighted gain around a cell: n_samples draws from the
/// disc of radius r_gain_max, each contributing exp(-gamma * (1 - 2p)).
/// Unknown and out-of-map samples count as p = 0.5.
double cell_gain(const GridMap& map, const CellIndex& center, double gamma,
                 double r_gain_max, int n_samples, Rng& rng,
                 bool clamp_occupied = false);

/// Accumulated branch gain with exponential distance discount.
double node_gain(double g_parent, double big_g, double edge_length,
                 double lambda);

/// Unknown cells within `range` of `node` with an occupancy-free straight
/// line to it (the receding-horizon gain term).
int visible_unknown_count(const GridMap& map, const Vec2& node, double range);

std::optional<PlanResult> plan_modified_nbv(const GridMap& map,
                                            const Pose& pose,
                                            const PlannerParams& params,
                                            Rng& rng);

std::optional<PlanResult> plan_rh_nbv(const GridMap& map, const Pose& pose,
                                      const PlannerParams& params, Rng& rng);

std::optional<PlanResult> plan_frontier(const GridMap& map, const Pose& pose,
                                        const PlannerParams& params, Rng& rng);

/// Dispatch on strategy. nullopt means no progress: nothing plannable
/// within the attempt cap.
std::optional<PlanResult> plan(Strategy strategy, const GridMap& map,
                               const Pose& pose, const PlannerParams& params,
                               Rng& rng);

/// Tree export: `node_id parent_id x y gain frontier_flag` per line.
void write_tree(const PlanResult& result, std::ostream& out);

}  // namespace explore
