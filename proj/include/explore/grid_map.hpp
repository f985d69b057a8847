#pragma once

#include "explore/geometry.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <string>

namespace explore {

/// Inverse sensor model and classification thresholds for the belief map.
struct MapParams {
  double l_occ = std::log(0.7 / 0.3);   // log-odds increment per hit
  double l_free = -std::log(0.7 / 0.3); // per miss
  double l_min = -2.0;
  double l_max = 3.5;
  double p_free = 0.35;  // classified Free below this probability
  double p_occ = 0.65;   // classified Occupied at or above this
};

enum class CellClass : uint8_t { Unknown = 0, Free = 1, Occupied = 2 };

/// The robot's belief map: a log-odds occupancy grid. Cells never observed
/// report probability 0.5 exactly. Owned by one episode; mutation is
/// single-threaded.
class GridMap {
 public:
  explicit GridMap(const GridGeometry& geom, const MapParams& params = {});

  const GridGeometry& geom() const { return geom_; }
  const MapParams& params() const { return params_; }

  double logodds(const CellIndex& c) const {
    check_cell(c);
    return logodds_(c.y(), c.x());
  }
  bool known(const CellIndex& c) const {
    check_cell(c);
    return known_(c.y(), c.x()) != 0;
  }
  long known_count() const { return known_count_; }

  void observe(const CellIndex& c, bool hit);

  /// Raw grids for batch consumers (render, planners).
  const Eigen::ArrayXXd& logodds_grid() const { return logodds_; }
  const Eigen::Array<uint8_t, Eigen::Dynamic, Eigen::Dynamic>& known_grid()
      const {
    return known_;
  }

 private:
  void check_cell(const CellIndex& c) const;

  GridGeometry geom_;
  MapParams params_;
  Eigen::ArrayXXd logodds_;                                  // (rows, cols)
  Eigen::Array<uint8_t, Eigen::Dynamic, Eigen::Dynamic> known_;
  long known_count_ = 0;
};

/// Projects a world point into the cell lattice (floor convention).
/// Throws std::out_of_range for points outside the map extent.
CellIndex world_to_cell(const GridMap& map, const Vec2& point);

void apply_observation(GridMap& map, const CellIndex& cell, bool hit);

/// p = 1 - 1/(1 + e^logodds); 0.5 for unobserved cells.
double probability(const GridMap& map, const CellIndex& cell);

CellClass classify(const GridMap& map, const CellIndex& cell);

/// Free cell with at least one Unknown 8-neighbor.
bool is_frontier(const GridMap& map, const CellIndex& cell);

/// Observed area: count of known cells times cell area.
double coverage_m2(const GridMap& map);

/// Classification of every cell, indexed (row, col).
Eigen::Array<uint8_t, Eigen::Dynamic, Eigen::Dynamic> class_grid(
    const GridMap& map);

/// Snapshot export: binary PGM (0 = occupied, 254 = free, 205 = unknown)
/// plus a `<path>.meta` sidecar holding resolution and origin.
void save_pgm(const GridMap& map, const std::string& path);

}  // namespace explore
