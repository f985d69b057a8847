#pragma once

#include "explore/geometry.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <string>

namespace explore {

using BoolGrid = Eigen::Array<uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Ground-truth environment: a closed boolean raster (true = solid).
/// Immutable after construction; safe to share across episodes.
struct World {
  std::string name;
  GridGeometry geom;  // origin fixed at (0, 0)
  BoolGrid solid;     // (rows, cols), indexed (row, col)
  double free_area_m2 = 0.0;

  bool solid_at(const CellIndex& c) const {
    return solid(c.y(), c.x()) != 0;
  }
  double width_m() const { return geom.width_m(); }
  double height_m() const { return geom.height_m(); }
};

/// Loads the ASCII raster format:
///   resolution <float>
///   size <cols> <rows>
///   <rows> lines of <cols> chars from {#, .}, top row first.
/// Throws std::invalid_argument on malformed input or an open boundary.
World load_world(const std::string& path);
World parse_world(std::istream& in, const std::string& name);

void save_world(const World& world, const std::string& path);
std::string world_to_text(const World& world);

/// True for points outside the raster (closed-world convention), otherwise
/// the value of the containing cell.
bool is_solid(const World& world, const Vec2& point);

struct MazeOptions {
  double corridor_m = 1.0;
  double wall_m = 0.2;
  double braid = 0.0;  // fraction of removable interior walls opened into loops
};

/// Deterministic depth-first maze over a corridor/wall lattice. Every free
/// cell is reachable from every other and the boundary ring is solid.
/// Throws std::invalid_argument when the requested dimensions cannot hold a
/// single corridor or the corridor is narrower than 4 cells.
World generate_maze(double width_m, double height_m, double resolution,
                    uint64_t seed, const MazeOptions& opts = {});

/// Center of the free cell nearest the world midpoint, heading 0.
Pose default_start(const World& world);

}  // namespace explore
