#include "explore/planner.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace explore;

namespace {

GridMap make_map(int cols, int rows, double res = 0.05) {
  return GridMap(GridGeometry{Vec2::Zero(), res, cols, rows});
}

void mark_rect(GridMap& map, int c0, int r0, int c1, int r1, bool hit,
               int repeats = 2) {
  for (int r = r0; r <= r1; ++r)
    for (int c = c0; c <= c1; ++c)
      for (int k = 0; k < repeats; ++k)
        apply_observation(map, CellIndex(c, r), hit);
}

/// 10 x 10 m scene, known free everywhere except one unknown vertical
/// strip at x in [7, 8.5].
GridMap corridor_scene() {
  GridMap map = make_map(200, 200);
  for (int r = 0; r < 200; ++r)
    for (int c = 0; c < 200; ++c)
      if (c < 140 || c >= 170) {
        apply_observation(map, CellIndex(c, r), false);
        apply_observation(map, CellIndex(c, r), false);
      }
  return map;
}

PlannerParams defaults() { return PlannerParams{}; }

/// Re-checks an edge's collision test by dense stepping at resolution/4.
/// The start vertex's own cell is exempt, matching the steering rule.
bool edge_clear_dense(const GridMap& map, const Vec2& a, const Vec2& b,
                      double alpha) {
  const Vec2 d = b - a;
  const double len = d.norm();
  if (len <= 0.0) return true;
  const Vec2 u = d / len;
  const Vec2 end = b + alpha * u;
  const double total = (end - a).norm();
  const int steps =
      std::max(2, static_cast<int>(total / (map.geom().resolution / 4)));
  const CellIndex start_cell = map.geom().cell_at(a);
  for (int k = 0; k <= steps; ++k) {
    const Vec2 p = a + (end - a) * (static_cast<double>(k) / steps);
    const auto cell = map.geom().try_cell_at(p);
    if (!cell) return false;
    if (*cell == start_cell) continue;
    if (map.known(*cell) && map.logodds(*cell) >= 0.0) return false;
  }
  return true;
}

void check_structure(const GridMap& map, const PlanResult& r,
                     const PlannerParams& p) {
  REQUIRE(!r.tree.empty());
  CHECK(r.tree[0].parent == -1);
  CHECK(r.tree[0].gain == 0.0);
  for (size_t i = 1; i < r.tree.size(); ++i) {
    const auto& n = r.tree[i];
    REQUIRE(n.parent >= 0);
    REQUIRE(n.parent < static_cast<int>(i));
    const double edge = (n.position - r.tree[n.parent].position).norm();
    CHECK(edge <= p.epsilon + 1e-9);
    CHECK(n.gain >= r.tree[n.parent].gain - 1e-12);  // monotone along paths
    CHECK(edge_clear_dense(map, r.tree[n.parent].position, n.position,
                           p.alpha));
  }
  REQUIRE(r.goal_node >= 1);
  CHECK(r.tree[r.goal_node].parent == 0);  // goal is depth-1 from the root
}

}  // namespace

TEST_CASE("sample_known_free draws only from free cells") {
  GridMap map = make_map(20, 20);
  Rng rng(1);
  CHECK(!sample_known_free(map, rng).has_value());  // fully unknown

  mark_rect(map, 5, 7, 5, 7, false);  // exactly one free cell
  for (int i = 0; i < 50; ++i) {
    const auto p = sample_known_free(map, rng);
    REQUIRE(p.has_value());
    CHECK(map.geom().cell_at(*p) == CellIndex(5, 7));
  }
}

TEST_CASE("sampling splits evenly between equal free regions") {
  GridMap map = make_map(100, 100);
  mark_rect(map, 0, 0, 9, 9, false);      // region A: 100 cells
  mark_rect(map, 80, 80, 89, 89, false);  // region B: 100 cells
  Rng rng(42);
  int in_a = 0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const auto p = sample_known_free(map, rng);
    REQUIRE(p.has_value());
    if (p->x() < 2.0) ++in_a;
  }
  CHECK(in_a > draws / 2 - 500);
  CHECK(in_a < draws / 2 + 500);
}

TEST_CASE("occupied-only maps cannot be sampled") {
  GridMap map = make_map(20, 20);
  mark_rect(map, 0, 0, 19, 19, true);
  Rng rng(3);
  CHECK(!sample_known_free(map, rng).has_value());
}

TEST_CASE("nearest neighbor breaks ties toward the lower id") {
  std::vector<RrtNode> tree;
  tree.push_back({Vec2(0, 0), -1, 0, false});
  CHECK(nearest_neighbor(tree, Vec2(5, 5)) == 0);

  tree.push_back({Vec2(2, 0), 0, 0, false});
  CHECK(nearest_neighbor(tree, Vec2(0.9, 0)) == 0);
  CHECK(nearest_neighbor(tree, Vec2(1.1, 0)) == 1);
  CHECK(nearest_neighbor(tree, Vec2(1.0, 0)) == 0);  // equidistant
}

TEST_CASE("steering clips to epsilon and respects obstacles") {
  GridMap map = make_map(200, 200);  // 10 x 10 m
  mark_rect(map, 0, 0, 199, 199, false);
  const PlannerParams p = defaults();

  SUBCASE("short samples are taken directly") {
    const auto out =
        steer_overshoot(map, Vec2(2, 2), Vec2(3, 2), p.epsilon, p.alpha);
    REQUIRE(out.kind == SteerOutcome::Accepted);
    CHECK(out.point == Vec2(3, 2));
  }
  SUBCASE("long samples are clipped to epsilon along the direction") {
    const auto out =
        steer_overshoot(map, Vec2(2, 2), Vec2(5, 2), p.epsilon, p.alpha);
    REQUIRE(out.kind == SteerOutcome::Accepted);
    CHECK(out.point.x() == doctest::Approx(3.5).epsilon(1e-12));
    CHECK(out.point.y() == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("degenerate samples are rejected") {
    CHECK(steer_overshoot(map, Vec2(2, 2), Vec2(2, 2), p.epsilon, p.alpha)
              .kind == SteerOutcome::Degenerate);
  }
  SUBCASE("a wall inside the overshoot margin blocks") {
    // occupied wall from x = 3.6: the overshoot reaches 3.5 + 0.3 = 3.8
    mark_rect(map, 72, 0, 75, 199, true, 3);
    const auto out =
        steer_overshoot(map, Vec2(2, 2), Vec2(5, 2), p.epsilon, p.alpha);
    CHECK(out.kind == SteerOutcome::Blocked);
  }
  SUBCASE("unknown cells do not block") {
    GridMap partial = make_map(200, 200);
    mark_rect(partial, 0, 0, 60, 199, false);  // known free up to x = 3.05
    const auto out =
        steer_overshoot(partial, Vec2(2, 2), Vec2(5, 2), p.epsilon, p.alpha);
    CHECK(out.kind == SteerOutcome::Accepted);
  }
  SUBCASE("leaving the map blocks") {
    const auto out = steer_overshoot(map, Vec2(9.4, 2), Vec2(9.95, 2),
                                     p.epsilon, p.alpha);
    CHECK(out.kind == SteerOutcome::Blocked);
  }
}

TEST_CASE("cell gain closed forms") {
  GridMap map = make_map(100, 100);
  const CellIndex center(50, 50);
  Rng rng(5);

  SUBCASE("all samples unknown") {
    CHECK(cell_gain(map, center, 4.0, 0.3, 20, rng) == 20.0);
  }
  SUBCASE("gamma zero is degenerate") {
    mark_rect(map, 40, 40, 60, 60, true);
    CHECK(cell_gain(map, center, 0.0, 0.3, 17, rng) == 17.0);
  }
  SUBCASE("uniformly free disc") {
    mark_rect(map, 0, 0, 99, 99, false);  // two misses per cell
    const double l = -2.0 * std::log(0.7 / 0.3);
    const double prob = 1.0 - 1.0 / (1.0 + std::exp(l));
    const double expect = 20.0 * std::exp(-4.0 * (1.0 - 2.0 * prob));
    CHECK(cell_gain(map, center, 4.0, 0.3, 20, rng) ==
          doctest::Approx(expect).epsilon(1e-12));
  }
  SUBCASE("clamped occupied contributions vanish") {
    mark_rect(map, 0, 0, 99, 99, true, 5);
    CHECK(cell_gain(map, center, 4.0, 0.3, 20, rng, true) == 0.0);
    CHECK(cell_gain(map, center, 4.0, 0.3, 20, rng, false) > 20.0);
  }
}

TEST_CASE("cell gain matches the disc expectation oracle") {
  GridMap map = make_map(100, 100);
  // mixed scene: free below, a wall band, unknown above
  mark_rect(map, 0, 0, 99, 52, false);
  mark_rect(map, 0, 53, 99, 55, true, 3);
  const CellIndex center(50, 50);

  const int n_samples = 20;
  const int trials = 1000;
  Rng rng(2024);
  double sum = 0.0, sumsq = 0.0;
  for (int t = 0; t < trials; ++t) {
    const double g = cell_gain(map, center, 4.0, 0.3, n_samples, rng);
    sum += g;
    sumsq += g * g;
  }
  const double mean = sum / trials;
  const double var = (sumsq - trials * mean * mean) / (trials - 1);
  const double se = std::sqrt(var / trials);

  const double expect =
      n_samples * oracles::disc_gain_expectation(map, center, 4.0, 0.3, false);
  CHECK(std::abs(mean - expect) <= 3.0 * se);
}

TEST_CASE("node gain accumulates with distance discount") {
  CHECK(node_gain(1.25, 2.0, 0.0, 0.5) == doctest::Approx(3.25));
  CHECK(node_gain(0.0, 1.0, 1.5, 0.5) ==
        doctest::Approx(std::exp(-0.75)).epsilon(1e-12));
  CHECK(node_gain(0.7, 0.0, 3.0, 0.5) == doctest::Approx(0.7));
}

TEST_CASE("planner aims its first edge at the unknown corridor") {
  const GridMap map = corridor_scene();
  const Pose pose = make_pose(4.0, 5.0, 0.0);

  int toward = 0;
  for (uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const auto result = plan_modified_nbv(map, pose, defaults(), rng);
    REQUIRE(result.has_value());
    // the unknown strip is due +x of the start
    if (std::abs(wrap_angle(result->goal.psi)) <= kPi / 4.0) ++toward;
  }
  CHECK(toward >= 8);
}

TEST_CASE("a single accepted node is both best and goal") {
  const GridMap map = corridor_scene();
  PlannerParams p = defaults();
  p.n_max = 1;
  Rng rng(3);
  const auto result = plan_modified_nbv(map, make_pose(4, 5, 0), p, rng);
  REQUIRE(result.has_value());
  CHECK(result->best_node == result->goal_node);
  CHECK(result->tree.size() >= 2);
  CHECK(result->best_gain > 0.0);
}

TEST_CASE("a fully explored scene still yields a plan") {
  GridMap map = make_map(100, 100);
  mark_rect(map, 0, 0, 99, 99, false);
  mark_rect(map, 0, 0, 99, 1, true, 3);    // south wall
  mark_rect(map, 0, 98, 99, 99, true, 3);  // north wall
  Rng rng(7);
  const auto result =
      plan_modified_nbv(map, make_pose(2.5, 2.5, 0.0), defaults(), rng);
  REQUIRE(result.has_value());
  CHECK(result->iterations_used >= defaults().n_max);
}

TEST_CASE("planners are deterministic for a fixed seed") {
  const GridMap map = corridor_scene();
  const Pose pose = make_pose(4.0, 5.0, 0.0);
  const PlannerParams p = defaults();
  for (Strategy s :
       {Strategy::ModifiedNbv, Strategy::RhNbv, Strategy::Frontier}) {
    Rng a(11), b(11);
    const auto r1 = plan(s, map, pose, p, a);
    const auto r2 = plan(s, map, pose, p, b);
    REQUIRE(r1.has_value());
    REQUIRE(r2.has_value());
    CHECK(r1->goal.x == r2->goal.x);
    CHECK(r1->goal.y == r2->goal.y);
    CHECK(r1->goal.psi == r2->goal.psi);
    CHECK(r1->best_gain == r2->best_gain);
    CHECK(r1->tree.size() == r2->tree.size());
    for (size_t i = 0; i < r1->tree.size(); ++i)
      CHECK(r1->tree[i].position == r2->tree[i].position);
  }
}

TEST_CASE("structural invariants hold on randomized partial maps") {
  Rng scene_rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    GridMap map = make_map(80, 80);
    mark_rect(map, 20, 20, 60, 60, false);  // free blob
    for (int k = 0; k < 6; ++k) {
      const int c = 10 + scene_rng.uniform_int(60);
      const int r = 10 + scene_rng.uniform_int(60);
      mark_rect(map, c, r, std::min(79, c + 2), std::min(79, r + 2), true, 3);
    }
    const Pose pose = make_pose(2.0, 2.0, 0.0);
    if (classify(map, map.geom().cell_at(pose.position())) != CellClass::Free)
      continue;
    Rng rng(trial);
    const auto result = plan_modified_nbv(map, pose, defaults(), rng);
    if (!result) continue;
    check_structure(map, *result, defaults());
  }
}

TEST_CASE("rejected samples do not count as insertions") {
  GridMap map = make_map(100, 100);
  // a small walled free island: most samples steer into the ring and are
  // rejected, but insertions still reach n_max
  mark_rect(map, 45, 45, 55, 55, false);
  mark_rect(map, 40, 40, 60, 44, true, 3);
  mark_rect(map, 40, 56, 60, 60, true, 3);
  mark_rect(map, 40, 45, 44, 55, true, 3);
  mark_rect(map, 56, 45, 60, 55, true, 3);
  PlannerParams p = defaults();
  p.n_max = 5;
  Rng rng(17);
  const auto result = plan_modified_nbv(map, make_pose(2.5, 2.5, 0), p, rng);
  REQUIRE(result.has_value());
  const int accepted = static_cast<int>(result->tree.size()) - 1;
  CHECK(accepted >= p.n_max);
  CHECK(result->iterations_used >= accepted);
}

TEST_CASE("strict steering mode inserts duplicate vertices") {
  GridMap map = make_map(100, 100);
  mark_rect(map, 45, 45, 55, 55, false);
  mark_rect(map, 40, 40, 60, 44, true, 3);
  mark_rect(map, 40, 56, 60, 60, true, 3);
  mark_rect(map, 40, 45, 44, 55, true, 3);
  mark_rect(map, 56, 45, 60, 55, true, 3);
  PlannerParams p = defaults();
  p.n_max = 10;
  p.strict_eq2 = true;
  Rng rng(17);
  const auto result = plan_modified_nbv(map, make_pose(2.5, 2.5, 0), p, rng);
  REQUIRE(result.has_value());
  int duplicates = 0;
  for (size_t i = 1; i < result->tree.size(); ++i) {
    const auto& n = result->tree[i];
    if ((n.position - result->tree[n.parent].position).norm() == 0.0)
      ++duplicates;
  }
  CHECK(duplicates > 0);
}

TEST_CASE("visible unknown count matches the brute-force oracle") {
  GridMap map = make_map(60, 60, 0.1);
  // half-known scene with a wall slab
  mark_rect(map, 0, 0, 59, 29, false);
  mark_rect(map, 20, 30, 39, 31, true, 3);
  Rng rng(4);
  for (int k = 0; k < 10; ++k) {
    const Vec2 node(rng.uniform(0.5, 5.5), rng.uniform(0.5, 2.8));
    CHECK(visible_unknown_count(map, node, 3.0) ==
          oracles::brute_visible_unknown(map, node, 3.0));
  }
}

TEST_CASE("a node far from unknown space contributes zero visibility gain") {
  GridMap map = make_map(200, 200);
  mark_rect(map, 0, 0, 199, 199, false);
  CHECK(visible_unknown_count(map, Vec2(5.0, 5.0), 8.0) == 0);
}

TEST_CASE("receding-horizon planner keeps identical tree mechanics") {
  const GridMap map = corridor_scene();
  Rng rng(13);
  const auto result =
      plan_rh_nbv(map, make_pose(4.0, 5.0, 0.0), defaults(), rng);
  REQUIRE(result.has_value());
  check_structure(map, *result, defaults());
  CHECK(result->best_gain > 0.0);
}

TEST_CASE("frontier planner finds the single reachable frontier region") {
  GridMap map = make_map(100, 100);
  // known scene with one unknown pocket behind a wall gap
  for (int r = 0; r < 100; ++r)
    for (int c = 0; c < 100; ++c) {
      const bool unknown_pocket = r >= 60 && r <= 80 && c >= 45 && c <= 55;
      if (unknown_pocket) continue;
      const bool wall = (r == 58 || r == 59) && (c <= 44 || c >= 56);
      for (int k = 0; k < 3; ++k)
        apply_observation(map, CellIndex(c, r), wall);
    }

  // exhaustive frontier scan for the expected region
  Vec2 frontier_centroid = Vec2::Zero();
  int frontier_count = 0;
  for (int r = 0; r < 100; ++r)
    for (int c = 0; c < 100; ++c)
      if (is_frontier(map, CellIndex(c, r))) {
        frontier_centroid += map.geom().cell_center(CellIndex(c, r));
        ++frontier_count;
      }
  REQUIRE(frontier_count > 0);
  frontier_centroid /= frontier_count;

  PlannerParams p = defaults();
  p.n_abs_max = 2000;
  Rng rng(21);
  const auto result = plan_frontier(map, make_pose(2.5, 2.5, 0.0), p, rng);
  REQUIRE(result.has_value());
  CHECK((result->goal.position() - frontier_centroid).norm() < 1.0);
}

TEST_CASE("frontier planner reports no progress without unknown space") {
  GridMap map = make_map(60, 60);
  mark_rect(map, 0, 0, 59, 59, false);
  PlannerParams p = defaults();
  p.n_abs_max = 60;
  Rng rng(2);
  CHECK(!plan_frontier(map, make_pose(1.5, 1.5, 0.0), p, rng).has_value());
}

TEST_CASE("frontier planner prefers the nearer of two comparable clusters") {
  GridMap map = make_map(120, 120);  // 6 x 6 m
  // known free middle band; equal unknown pockets at both ends, the west
  // one 1 m from the start and the east one 3 m
  for (int r = 0; r < 120; ++r)
    for (int c = 0; c < 120; ++c) {
      if (c <= 20 || c >= 100) continue;
      apply_observation(map, CellIndex(c, r), false);
      apply_observation(map, CellIndex(c, r), false);
    }
  PlannerParams p = defaults();
  p.n_abs_max = 20000;
  p.n_max = 300;  // dense tree so both frontier lines collect vertices
  Rng rng(5);
  const auto result = plan_frontier(map, make_pose(2.0, 3.0, 0.0), p, rng);
  REQUIRE(result.has_value());
  bool west_found = false, east_found = false;
  for (const auto& n : result->tree) {
    if (!n.is_frontier_node) continue;
    (n.position.x() < 3.0 ? west_found : east_found) = true;
  }
  REQUIRE(west_found);
  REQUIRE(east_found);
  CHECK(result->goal.x < 3.0);  // west side wins on distance
}

TEST_CASE("tree export writes one line per node") {
  const GridMap map = corridor_scene();
  Rng rng(1);
  const auto result =
      plan_modified_nbv(map, make_pose(4.0, 5.0, 0.0), defaults(), rng);
  REQUIRE(result.has_value());
  std::ostringstream out;
  write_tree(*result, out);
  int lines = 0;
  for (char ch : out.str())
    if (ch == '\n') ++lines;
  CHECK(lines == static_cast<int>(result->tree.size()));
}
