#pragma once

#include "explore/grid_map.hpp"
#include "explore/sim.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace explore {

/// Grayscale occupancy snapshot (0 occupied, 254 free, 205 unknown),
/// indexed (row, col) with row 0 at minimum y.
struct MapImage {
  GridGeometry geom;
  Eigen::Array<uint8_t, Eigen::Dynamic, Eigen::Dynamic> gray;
};

MapImage to_map_image(const GridMap& map);

/// Reads a binary PGM written by save_pgm, using its `.meta` sidecar for
/// resolution and origin.
MapImage load_pgm(const std::string& path);

/// RGB raster, row 0 at the top.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> rgb;
};

/// Occupancy base layer with the trajectory polyline in blue, goals as red
/// dots, the start marker in green and the final pose marker in yellow.
Image render_episode(const EpisodeLog& log, const MapImage& base);

/// Binary PPM (P6).
void save_ppm(const Image& image, const std::string& path);

}  // namespace explore
