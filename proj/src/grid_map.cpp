#include "explore/grid_map.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace explore {

GridMap::GridMap(const GridGeometry& geom, const MapParams& params)
    : geom_(geom), params_(params) {
  if (geom.cols <= 0 || geom.rows <= 0)
    throw std::invalid_argument("map dimensions must be positive");
  logodds_.setZero(geom.rows, geom.cols);
  known_.setZero(geom.rows, geom.cols);
}

void GridMap::check_cell(const CellIndex& c) const {
  if (!geom_.contains(c))
    throw std::out_of_range("cell index (" + std::to_string(c.x()) + ", " +
                            std::to_string(c.y()) + ") outside map");
}

void GridMap::observe(const CellIndex& c, bool hit) {
  check_cell(c);
  double& l = logodds_(c.y(), c.x());
  l += hit ? params_.l_occ : params_.l_free;
  l = std::clamp(l, params_.l_min, params_.l_max);
  uint8_t& k = known_(c.y(), c.x());
  if (!k) {
    k = 1;
    ++known_count_;
  }
}

CellIndex world_to_cell(const GridMap& map, const Vec2& point) {
  const auto cell = map.geom().try_cell_at(point);
  if (!cell)
    throw std::out_of_range("point (" + std::to_string(point.x()) + ", " +
                            std::to_string(point.y()) + ") outside map extent");
  return *cell;
}

void apply_observation(GridMap& map, const CellIndex& cell, bool hit) {
  map.observe(cell, hit);
}

double probability(const GridMap& map, const CellIndex& cell) {
  return 1.0 - 1.0 / (1.0 + std::exp(map.logodds(cell)));
}

CellClass classify(const GridMap& map, const CellIndex& cell) {
  if (!map.known(cell)) return CellClass::Unknown;
  const double p = probability(map, cell);
  if (p < map.params().p_free) return CellClass::Free;
  if (p >= map.params().p_occ) return CellClass::Occupied;
  return CellClass::Unknown;  // uncertain band is unknown for planning
}

bool is_frontier(const GridMap& map, const CellIndex& cell) {
  if (classify(map, cell) != CellClass::Free) return false;
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      if (dx == 0 && dy == 0) continue;
      const CellIndex n(cell.x() + dx, cell.y() + dy);
      if (!map.geom().contains(n)) continue;
      if (classify(map, n) == CellClass::Unknown) return true;
    }
  }
  return false;
}

double coverage_m2(const GridMap& map) {
  return map.known_count() * map.geom().resolution * map.geom().resolution;
}

Eigen::Array<uint8_t, Eigen::Dynamic, Eigen::Dynamic> class_grid(
    const GridMap& map) {
  const auto& geom = map.geom();
  Eigen::Array<uint8_t, Eigen::Dynamic, Eigen::Dynamic> cls(geom.rows,
                                                            geom.cols);
  const auto& lo = map.logodds_grid();
  const auto& known = map.known_grid();
  const auto& p = map.params();
  // Classification thresholds expressed in log-odds to skip per-cell exp.
  const double l_free_thr = std::log(p.p_free / (1.0 - p.p_free));
  const double l_occ_thr = std::log(p.p_occ / (1.0 - p.p_occ));
  for (int r = 0; r < geom.rows; ++r) {
    for (int c = 0; c < geom.cols; ++c) {
      uint8_t v = static_cast<uint8_t>(CellClass::Unknown);
      if (known(r, c)) {
        if (lo(r, c) < l_free_thr)
          v = static_cast<uint8_t>(CellClass::Free);
        else if (lo(r, c) >= l_occ_thr)
          v = static_cast<uint8_t>(CellClass::Occupied);
      }
      cls(r, c) = v;
    }
  }
  return cls;
}

void save_pgm(const GridMap& map, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write map file: " + path);
  const auto& geom = map.geom();
  const auto cls = class_grid(map);
  out << "P5\n" << geom.cols << " " << geom.rows << "\n255\n";
  for (int r = geom.rows - 1; r >= 0; --r) {
    for (int c = 0; c < geom.cols; ++c) {
      uint8_t v = 205;
      if (cls(r, c) == static_cast<uint8_t>(CellClass::Free)) v = 254;
      if (cls(r, c) == static_cast<uint8_t>(CellClass::Occupied)) v = 0;
      out.put(static_cast<char>(v));
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);

  std::ofstream meta(path + ".meta");
  if (!meta) throw std::runtime_error("cannot write map sidecar: " + path);
  meta << "resolution " << geom.resolution << "\n";
  meta << "origin " << geom.origin.x() << " " << geom.origin.y() << "\n";
}

}  // namespace explore
