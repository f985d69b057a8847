#pragma once

#include <Eigen/Core>

#include <cmath>
#include <optional>

namespace explore {

using Vec2 = Eigen::Vector2d;
using CellIndex = Eigen::Vector2i;  // x() = column, y() = row

inline constexpr double kPi = 3.14159265358979323846;

/// Normalizes an angle into (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double psi = 0.0;  // heading, (-pi, pi]

  Vec2 position() const { return Vec2(x, y); }
};

inline Pose make_pose(double x, double y, double psi) {
  return Pose{x, y, wrap_angle(psi)};
}

/// Placement of a cell lattice in the plane. Points on a cell boundary
/// belong to the higher-index cell (floor convention).
struct GridGeometry {
  Vec2 origin = Vec2::Zero();  // corner of cell (0, 0)
  double resolution = 0.05;    // meters per cell
  int cols = 0;
  int rows = 0;

  double width_m() const { return cols * resolution; }
  double height_m() const { return rows * resolution; }

  bool contains(const CellIndex& c) const {
    return c.x() >= 0 && c.x() < cols && c.y() >= 0 && c.y() < rows;
  }

  bool contains(const Vec2& p) const {
    const Vec2 rel = p - origin;
    return rel.x() >= 0.0 && rel.x() < width_m() && rel.y() >= 0.0 &&
           rel.y() < height_m();
  }

  /// Cell containing `p`; only valid when contains(p).
  CellIndex cell_at(const Vec2& p) const {
    const Vec2 rel = (p - origin) / resolution;
    return CellIndex(static_cast<int>(std::floor(rel.x())),
                     static_cast<int>(std::floor(rel.y())));
  }

  std::optional<CellIndex> try_cell_at(const Vec2& p) const {
    if (!contains(p)) return std::nullopt;
    CellIndex c = cell_at(p);
    // Guard against floating-point edge effects right at the extent border.
    c.x() = std::min(c.x(), cols - 1);
    c.y() = std::min(c.y(), rows - 1);
    return c;
  }

  Vec2 cell_center(const CellIndex& c) const {
    return origin + resolution * Vec2(c.x() + 0.5, c.y() + 0.5);
  }

  Vec2 cell_corner(const CellIndex& c) const {
    return origin + resolution * Vec2(c.x(), c.y());
  }
};

}  // namespace explore
