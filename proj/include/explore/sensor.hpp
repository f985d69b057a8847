#pragma once

#include "explore/geometry.hpp"
#include "explore/grid_map.hpp"
#include "explore/random.hpp"
#include "explore/world.hpp"

#include <iosfwd>
#include <vector>

namespace explore {

struct LidarSpec {
  double fov = 240.0 * kPi / 180.0;
  int ray_count = 720;
  double max_range = 8.0;
  double range_noise_sigma = 0.01;
};

/// One range sweep. Bearings are absolute (map frame) at capture time.
/// hits[i] == 0 means a max-range return with no obstacle.
struct LidarScan {
  Pose pose;
  std::vector<double> bearings;
  std::vector<double> ranges;
  std::vector<uint8_t> hits;
};

/// Casts ray_count rays across the field of view against the ground-truth
/// raster. Ray i leaves at pose.psi + (-fov/2 + i * fov/(ray_count-1));
/// ranges are exact distances to the first solid cell boundary, with
/// truncated Gaussian noise added to hit returns. Throws
/// std::invalid_argument when the pose sits in a solid cell.
LidarScan simulate_scan(const World& world, const Pose& pose,
                        const LidarSpec& spec, Rng& rng);

/// Inverse sensor model: every cell crossed between the scan pose and a
/// return point receives a miss; the terminal cell of a hit ray receives a
/// hit instead. Rays leaving the map extent are truncated at the border.
void integrate_scan(GridMap& map, const LidarScan& scan);

/// Debug dump: one `bearing_rad range_m hit` line per ray.
void dump_scan(const LidarScan& scan, std::ostream& out);

}  // namespace explore
