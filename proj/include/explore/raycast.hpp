#pragma once

#include "explore/geometry.hpp"

#include <cmath>
#include <limits>

namespace explore {

/// Exact voxel walk over the cells crossed by the segment [a, b]
/// (Amanatides & Woo). Visits cells in order, starting with the cell
/// containing `a`; each visit receives the cell and the distance along the
/// segment at which the ray enters it. The visitor returns false to stop.
/// Traversal ends when the segment ends or leaves the grid. `a` must lie
/// inside the grid.
template <class Visitor>
void walk_cells(const GridGeometry& g, const Vec2& a, const Vec2& b,
                Visitor&& visit) {
  if (!g.contains(a)) return;
  CellIndex cell = g.cell_at(a);
  const Vec2 d = b - a;
  const double len = d.norm();
  if (!visit(cell, 0.0)) return;
  if (len <= 0.0) return;

  const Vec2 u = d / len;
  const double inf = std::numeric_limits<double>::infinity();

  int step_x = 0, step_y = 0;
  double t_max_x = inf, t_max_y = inf;
  double t_delta_x = inf, t_delta_y = inf;

  if (u.x() > 0.0) {
    step_x = 1;
    t_delta_x = g.resolution / u.x();
    const double bx = g.origin.x() + (cell.x() + 1) * g.resolution;
    t_max_x = (bx - a.x()) / u.x();
  } else if (u.x() < 0.0) {
    step_x = -1;
    t_delta_x = -g.resolution / u.x();
    const double bx = g.origin.x() + cell.x() * g.resolution;
    t_max_x = (bx - a.x()) / u.x();
  }
  if (u.y() > 0.0) {
    step_y = 1;
    t_delta_y = g.resolution / u.y();
    const double by = g.origin.y() + (cell.y() + 1) * g.resolution;
    t_max_y = (by - a.y()) / u.y();
  } else if (u.y() < 0.0) {
    step_y = -1;
    t_delta_y = -g.resolution / u.y();
    const double by = g.origin.y() + cell.y() * g.resolution;
    t_max_y = (by - a.y()) / u.y();
  }

  while (true) {
    double t;
    if (t_max_x <= t_max_y) {
      t = t_max_x;
      if (t > len) return;
      cell.x() += step_x;
      t_max_x += t_delta_x;
    } else {
      t = t_max_y;
      if (t > len) return;
      cell.y() += step_y;
      t_max_y += t_delta_y;
    }
    if (!g.contains(cell)) return;
    if (!visit(cell, t)) return;
  }
}

}  // namespace explore
