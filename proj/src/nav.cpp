#include "explore/nav.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace explore {

namespace {

const double kSqrt2 = std::sqrt(2.0);

std::vector<CellIndex> disc_offsets(double radius_cells) {
  std::vector<CellIndex> offsets;
  const int r = static_cast<int>(std::floor(radius_cells));
  const double r2 = radius_cells * radius_cells;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx)
      if (dx * dx + dy * dy <= r2) offsets.emplace_back(dx, dy);
  return offsets;
}

double octile(const CellIndex& a, const CellIndex& b) {
  const int dx = std::abs(a.x() - b.x());
  const int dy = std::abs(a.y() - b.y());
  return (dx + dy) + (kSqrt2 - 2.0) * std::min(dx, dy);
}

/// Cells of the two-run path from a to b: all diagonal steps bundled
/// first, then the straight remainder (or the reverse order). Returns an
/// empty vector when the run is blocked. Step legality matches the search:
/// diagonal moves need both orthogonal neighbors free.
std::vector<CellIndex> two_run_cells(const Costmask& mask, const CellIndex& a,
                                     const CellIndex& b, bool diagonal_first) {
  const int dx = b.x() - a.x(), dy = b.y() - a.y();
  const int sx = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
  const int sy = dy > 0 ? 1 : (dy < 0 ? -1 : 0);
  const int n_diag = std::min(std::abs(dx), std::abs(dy));
  const int n_straight = std::abs(std::abs(dx) - std::abs(dy));
  const bool straight_on_x = std::abs(dx) >= std::abs(dy);

  std::vector<CellIndex> cells;
  CellIndex cur = a;
  auto step = [&](int mx, int my) {
    const CellIndex nxt(cur.x() + mx, cur.y() + my);
    if (mask(nxt.y(), nxt.x())) return false;
    if (mx != 0 && my != 0 &&
        (mask(cur.y(), nxt.x()) || mask(nxt.y(), cur.x())))
      return false;
    cur = nxt;
    cells.push_back(cur);
    return true;
  };
  for (int phase = 0; phase < 2; ++phase) {
    const bool diag = (phase == 0) == diagonal_first;
    const int count = diag ? n_diag : n_straight;
    for (int i = 0; i < count; ++i) {
      const int mx = diag ? sx : (straight_on_x ? sx : 0);
      const int my = diag ? sy : (straight_on_x ? 0 : sy);
      if (!step(mx, my)) return {};
    }
  }
  return cells;
}

/// Rewrites the grid path into equal-cost straight and diagonal runs so
/// the follower turns at a handful of bends instead of every cell.
std::vector<CellIndex> straighten_cells(const Costmask& mask,
                                        const std::vector<CellIndex>& cells) {
  if (cells.size() < 3) return cells;
  constexpr size_t kWindow = 80;
  std::vector<CellIndex> out;
  out.push_back(cells.front());
  size_t i = 0;
  while (i + 1 < cells.size()) {
    const size_t limit = std::min(cells.size() - 1, i + kWindow);
    size_t chosen = i + 1;
    std::vector<CellIndex> run{cells[i + 1]};
    for (size_t j = limit; j > i + 1; --j) {
      auto r = two_run_cells(mask, cells[i], cells[j], true);
      if (r.empty()) r = two_run_cells(mask, cells[i], cells[j], false);
      if (!r.empty()) {
        chosen = j;
        run = std::move(r);
        break;
      }
    }
    out.insert(out.end(), run.begin(), run.end());
    i = chosen;
  }
  return out;
}

}  // namespace

Costmask inflate(const GridMap& map, double robot_radius) {
  if (robot_radius < 0.0)
    throw std::invalid_argument("robot radius must be non-negative");
  const auto& geom = map.geom();
  const auto cls = class_grid(map);

  Costmask mask(geom.rows, geom.cols);
  const auto unknown = static_cast<uint8_t>(CellClass::Unknown);
  const auto occupied = static_cast<uint8_t>(CellClass::Occupied);
  for (int r = 0; r < geom.rows; ++r)
    for (int c = 0; c < geom.cols; ++c)
      mask(r, c) = cls(r, c) == unknown ? 1 : 0;

  const auto offsets = disc_offsets(robot_radius / geom.resolution);
  for (int r = 0; r < geom.rows; ++r) {
    for (int c = 0; c < geom.cols; ++c) {
      if (cls(r, c) != occupied) continue;
      for (const auto& d : offsets) {
        const int rr = r + d.y(), cc = c + d.x();
        if (rr >= 0 && rr < geom.rows && cc >= 0 && cc < geom.cols)
          mask(rr, cc) = 1;
      }
    }
  }
  return mask;
}

void clear_disc(Costmask& mask, const GridGeometry& geom, const Vec2& center,
                double radius) {
  const auto cell = geom.try_cell_at(center);
  if (!cell) return;
  for (const auto& d : disc_offsets(radius / geom.resolution)) {
    const int rr = cell->y() + d.y(), cc = cell->x() + d.x();
    if (rr >= 0 && rr < geom.rows && cc >= 0 && cc < geom.cols)
      mask(rr, cc) = 0;
  }
}

std::optional<NavPath> astar(const GridMap& map, const Costmask& mask,
                             const Vec2& start, const Vec2& goal) {
  const auto& geom = map.geom();
  const auto start_cell = geom.try_cell_at(start);
  const auto goal_point_cell = geom.try_cell_at(goal);
  if (!start_cell) return std::nullopt;
  if (mask(start_cell->y(), start_cell->x()))
    throw std::invalid_argument("astar start cell is untraversable");

  // Retarget an untraversable goal to the nearest traversable cell within
  // 0.5 m of the goal point.
  CellIndex goal_cell(-1, -1);
  bool retargeted = false;
  if (goal_point_cell && !mask(goal_point_cell->y(), goal_point_cell->x())) {
    goal_cell = *goal_point_cell;
  } else {
    constexpr double kRetargetRadius = 0.5;
    const int rc =
        static_cast<int>(std::ceil(kRetargetRadius / geom.resolution));
    const CellIndex anchor =
        goal_point_cell ? *goal_point_cell
                        : geom.cell_at(Vec2(
                              std::clamp(goal.x(), geom.origin.x(),
                                         geom.origin.x() + geom.width_m() -
                                             geom.resolution / 2),
                              std::clamp(goal.y(), geom.origin.y(),
                                         geom.origin.y() + geom.height_m() -
                                             geom.resolution / 2)));
    double best = std::numeric_limits<double>::infinity();
    for (int r = std::max(0, anchor.y() - rc);
         r <= std::min(geom.rows - 1, anchor.y() + rc); ++r) {
      for (int c = std::max(0, anchor.x() - rc);
           c <= std::min(geom.cols - 1, anchor.x() + rc); ++c) {
        if (mask(r, c)) continue;
        const double d = (geom.cell_center(CellIndex(c, r)) - goal).norm();
        if (d <= kRetargetRadius && d < best) {
          best = d;
          goal_cell = CellIndex(c, r);
        }
      }
    }
    if (goal_cell.x() < 0) return std::nullopt;
    retargeted = true;
  }

  const int cols = geom.cols, rows = geom.rows;
  auto id = [cols](const CellIndex& c) { return c.y() * cols + c.x(); };

  std::vector<double> dist(static_cast<size_t>(cols) * rows,
                           std::numeric_limits<double>::infinity());
  std::vector<int> parent(static_cast<size_t>(cols) * rows, -1);
  using Entry = std::pair<double, int>;  // (f, cell id)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;

  dist[id(*start_cell)] = 0.0;
  open.emplace(octile(*start_cell, goal_cell), id(*start_cell));

  const int goal_id = id(goal_cell);
  while (!open.empty()) {
    const auto [f, cur] = open.top();
    open.pop();
    if (cur == goal_id) break;
    const CellIndex cc(cur % cols, cur / cols);
    if (f > dist[cur] + octile(cc, goal_cell) + 1e-12) continue;  // stale
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const CellIndex nb(cc.x() + dx, cc.y() + dy);
        if (nb.x() < 0 || nb.x() >= cols || nb.y() < 0 || nb.y() >= rows)
          continue;
        if (mask(nb.y(), nb.x())) continue;
        if (dx != 0 && dy != 0) {
          // no corner cutting past blocked orthogonal neighbors
          if (mask(cc.y(), nb.x()) || mask(nb.y(), cc.x())) continue;
        }
        const double step = (dx != 0 && dy != 0) ? kSqrt2 : 1.0;
        const double nd = dist[cur] + step;
        const int nid = id(nb);
        if (nd < dist[nid] - 1e-12) {
          dist[nid] = nd;
          parent[nid] = cur;
          open.emplace(nd + octile(nb, goal_cell), nid);
        }
      }
    }
  }
  if (dist[goal_id] == std::numeric_limits<double>::infinity())
    return std::nullopt;

  NavPath path;
  for (int cur = goal_id; cur != -1; cur = parent[cur])
    path.cells.emplace_back(cur % cols, cur / cols);
  std::reverse(path.cells.begin(), path.cells.end());
  path.cells = straighten_cells(mask, path.cells);

  path.waypoints.push_back(start);
  if (path.cells.size() == 1) {
    const Vec2 end = retargeted ? geom.cell_center(goal_cell) : goal;
    if ((end - start).norm() > 0.0) path.waypoints.push_back(end);
  } else {
    for (const auto& c : path.cells) {
      const Vec2 center = geom.cell_center(c);
      if ((center - path.waypoints.back()).norm() > 0.0)
        path.waypoints.push_back(center);
    }
    if (!retargeted && (goal - path.waypoints.back()).norm() > 0.0)
      path.waypoints.push_back(goal);
  }

  path.length_m = 0.0;
  for (size_t i = 1; i < path.waypoints.size(); ++i)
    path.length_m += (path.waypoints[i] - path.waypoints[i - 1]).norm();
  return path;
}

std::vector<TimedPose> follow(const NavPath& path, const Pose& start_pose,
                              double v_max, double psi_max, double dt) {
  if (path.waypoints.empty())
    throw std::invalid_argument("cannot follow an empty path");
  if (dt <= 0.0 || v_max <= 0.0 || psi_max <= 0.0)
    throw std::invalid_argument("follow requires positive dt, v_max, psi_max");

  std::vector<TimedPose> traj;
  traj.push_back({0.0, start_pose});

  // Collapse interior collinear waypoints so straight runs execute as one
  // segment instead of cell-sized nibbles.
  std::vector<Vec2> targets;
  targets.reserve(path.waypoints.size());
  for (const auto& w : path.waypoints) {
    while (targets.size() >= 2) {
      const Vec2 a = targets[targets.size() - 2];
      const Vec2 b = targets[targets.size() - 1];
      const Vec2 u = b - a, v = w - b;
      const double cross = u.x() * v.y() - u.y() * v.x();
      if (cross == 0.0 && u.dot(v) > 0.0)
        targets.pop_back();
      else
        break;
    }
    targets.push_back(w);
  }

  Pose pose = start_pose;
  size_t wp = 0;
  long step = 0;
  const long max_steps = 100000000;
  constexpr double kArrive = 1e-9;

  while (wp < targets.size()) {
    const Vec2 target = targets[wp];
    const Vec2 delta = target - pose.position();
    const double dist = delta.norm();
    if (dist <= kArrive) {
      ++wp;
      continue;
    }
    const double desired = std::atan2(delta.y(), delta.x());
    const double diff = wrap_angle(desired - pose.psi);
    if (std::abs(diff) > 1e-9) {
      const double turn = std::clamp(diff, -psi_max * dt, psi_max * dt);
      pose.psi = wrap_angle(pose.psi + turn);
    } else {
      const double advance = std::min(v_max * dt, dist);
      pose.x += advance * std::cos(pose.psi);
      pose.y += advance * std::sin(pose.psi);
    }
    ++step;
    traj.push_back({step * dt, pose});
    if (step > max_steps)
      throw std::runtime_error("path follower failed to converge");
  }
  return traj;
}

bool path_blocked(const GridMap& map, const std::vector<CellIndex>& cells,
                  size_t first, double robot_radius) {
  const auto& geom = map.geom();
  const int rc = static_cast<int>(std::floor(robot_radius / geom.resolution));
  const double r2 = (robot_radius / geom.resolution) *
                    (robot_radius / geom.resolution);
  for (size_t i = first; i < cells.size(); ++i) {
    const CellIndex& c = cells[i];
    if (classify(map, c) != CellClass::Free) return true;
    for (int dy = -rc; dy <= rc; ++dy) {
      for (int dx = -rc; dx <= rc; ++dx) {
        if (dx * dx + dy * dy > r2) continue;
        const CellIndex nb(c.x() + dx, c.y() + dy);
        if (!geom.contains(nb)) continue;
        if (classify(map, nb) == CellClass::Occupied) return true;
      }
    }
  }
  return false;
}

}  // namespace explore
