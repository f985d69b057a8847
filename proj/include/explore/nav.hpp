#pragma once

#include "explore/geometry.hpp"
#include "explore/grid_map.hpp"

#include <Eigen/Core>

#include <optional>
#include <vector>

namespace explore {

/// 1 = untraversable, indexed (row, col).
using Costmask = Eigen::Array<uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Marks cells within robot_radius (center to center) of any Occupied cell,
/// plus all Unknown cells, as untraversable.
Costmask inflate(const GridMap& map, double robot_radius);

/// Re-opens a disc of cells around `center`; used to keep the robot's own
/// footprint plannable.
void clear_disc(Costmask& mask, const GridGeometry& geom, const Vec2& center,
                double radius);

struct NavPath {
  std::vector<Vec2> waypoints;   // exact start, cell centers, exact goal
  double length_m = 0.0;
  std::vector<CellIndex> cells;  // grid path, start cell first
};

/// 8-connected shortest path (1 / sqrt(2) step costs, octile heuristic).
/// Diagonal moves require both adjacent orthogonal cells to be traversable.
/// Untraversable goals retarget to the nearest traversable cell within
/// 0.5 m. Returns nullopt when unreachable.
std::optional<NavPath> astar(const GridMap& map, const Costmask& mask,
                             const Vec2& start, const Vec2& goal);

struct TimedPose {
  double t = 0.0;
  Pose pose;
};

/// Turn-then-drive kinematics: rotate in place at psi_max toward each
/// waypoint, then translate at v_max. One rotation or translation action
/// per dt step; the final pose lands exactly on the last waypoint.
std::vector<TimedPose> follow(const NavPath& path, const Pose& start_pose,
                              double v_max, double psi_max, double dt);

/// True when any remaining path cell is no longer Free or sits within
/// robot_radius of an Occupied cell.
bool path_blocked(const GridMap& map, const std::vector<CellIndex>& cells,
                  size_t first, double robot_radius);

}  // namespace explore
