#include "explore/sensor.hpp"

#include "explore/raycast.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace explore {

namespace {

/// Distance along the ray at which it first enters a solid cell, or
/// max_range when nothing is hit within range.
double cast_ray(const World& world, const Vec2& from, double bearing,
                double max_range, bool& hit) {
  const Vec2 dir(std::cos(bearing), std::sin(bearing));
  const Vec2 to = from + max_range * dir;
  double range = max_range;
  hit = false;
  walk_cells(world.geom, from, to, [&](const CellIndex& c, double t) {
    if (world.solid_at(c)) {
      range = t;
      hit = true;
      return false;
    }
    return true;
  });
  return range;
}

}  // namespace

LidarScan simulate_scan(const World& world, const Pose& pose,
                        const LidarSpec& spec, Rng& rng) {
  const Vec2 p = pose.position();
  if (is_solid(world, p))
    throw std::invalid_argument("scan pose lies inside a solid cell");

  LidarScan scan;
  scan.pose = pose;
  scan.bearings.resize(spec.ray_count);
  scan.ranges.resize(spec.ray_count);
  scan.hits.resize(spec.ray_count);

  const double step =
      spec.ray_count > 1 ? spec.fov / (spec.ray_count - 1) : 0.0;
  for (int i = 0; i < spec.ray_count; ++i) {
    const double bearing = pose.psi - spec.fov / 2.0 + i * step;
    bool hit = false;
    double range = cast_ray(world, p, bearing, spec.max_range, hit);
    if (hit && spec.range_noise_sigma > 0.0) {
      for (int tries = 0; tries < 100; ++tries) {
        const double noisy = range + rng.normal(spec.range_noise_sigma);
        if (noisy > 0.0 && noisy <= spec.max_range) {
          range = noisy;
          break;
        }
      }
    }
    scan.bearings[i] = bearing;
    scan.ranges[i] = hit ? range : spec.max_range;
    scan.hits[i] = hit ? 1 : 0;
  }
  return scan;
}

void integrate_scan(GridMap& map, const LidarScan& scan) {
  const Vec2 from = scan.pose.position();
  if (!map.geom().contains(from)) return;

  // Collect the cells crossed by each ray, then apply the terminal hit
  // last so a hit is never overwritten by this ray's own free run.
  static thread_local std::vector<CellIndex> cells;
  for (size_t i = 0; i < scan.ranges.size(); ++i) {
    const double bearing = scan.bearings[i];
    // Hit returns land exactly on the terminal cell's boundary when the
    // range is noise-free; nudge the walk past it so that cell is visited.
    const double reach =
        scan.ranges[i] + (scan.hits[i] ? 1e-9 : 0.0);
    const Vec2 to = from + reach * Vec2(std::cos(bearing), std::sin(bearing));
    cells.clear();
    walk_cells(map.geom(), from, to, [&](const CellIndex& c, double) {
      cells.push_back(c);
      return true;
    });
    if (cells.empty()) continue;
    const bool hit = scan.hits[i] != 0;
    const size_t free_run = hit ? cells.size() - 1 : cells.size();
    for (size_t k = 0; k < free_run; ++k) map.observe(cells[k], false);
    if (hit) map.observe(cells.back(), true);
  }
}

void dump_scan(const LidarScan& scan, std::ostream& out) {
  for (size_t i = 0; i < scan.ranges.size(); ++i) {
    out << scan.bearings[i] << " " << scan.ranges[i] << " "
        << (scan.hits[i] ? 1 : 0) << "\n";
  }
}

}  // namespace explore
