#include "explore/world.hpp"

#include "explore/random.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace explore {

namespace {

double recompute_free_area(const World& w) {
  const long free_cells =
      static_cast<long>(w.solid.size()) - w.solid.cast<long>().sum();
  return free_cells * w.geom.resolution * w.geom.resolution;
}

void validate_closed_boundary(const World& w) {
  const int rows = w.geom.rows, cols = w.geom.cols;
  for (int c = 0; c < cols; ++c) {
    if (!w.solid(0, c) || !w.solid(rows - 1, c))
      throw std::invalid_argument(w.name + ": boundary ring is not solid");
  }
  for (int r = 0; r < rows; ++r) {
    if (!w.solid(r, 0) || !w.solid(r, cols - 1))
      throw std::invalid_argument(w.name + ": boundary ring is not solid");
  }
}

}  // namespace

World parse_world(std::istream& in, const std::string& name) {
  std::string key;
  double resolution = 0.0;
  int cols = 0, rows = 0;

  if (!(in >> key) || key != "resolution" || !(in >> resolution) ||
      resolution <= 0.0)
    throw std::invalid_argument(name + ": bad 'resolution' header line");
  if (!(in >> key) || key != "size" || !(in >> cols >> rows) || cols <= 0 ||
      rows <= 0)
    throw std::invalid_argument(name + ": bad 'size' header line");
  std::string rest;
  std::getline(in, rest);

  World w;
  w.name = name;
  w.geom = GridGeometry{Vec2::Zero(), resolution, cols, rows};
  w.solid.setZero(rows, cols);

  for (int i = 0; i < rows; ++i) {
    std::string line;
    if (!std::getline(in, line))
      throw std::invalid_argument(name + ": missing raster row " +
                                  std::to_string(i));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (static_cast<int>(line.size()) != cols)
      throw std::invalid_argument(name + ": raster row " + std::to_string(i) +
                                  " has length " +
                                  std::to_string(line.size()) + ", expected " +
                                  std::to_string(cols));
    const int r = rows - 1 - i;  // file row 0 is the max-y row
    for (int c = 0; c < cols; ++c) {
      if (line[c] == '#') {
        w.solid(r, c) = 1;
      } else if (line[c] == '.') {
        w.solid(r, c) = 0;
      } else {
        throw std::invalid_argument(name + ": unexpected character '" +
                                    std::string(1, line[c]) + "' in raster");
      }
    }
  }

  validate_closed_boundary(w);
  w.free_area_m2 = recompute_free_area(w);
  return w;
}

World load_world(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open world file: " + path);
  return parse_world(in, std::filesystem::path(path).stem().string());
}

std::string world_to_text(const World& world) {
  std::ostringstream out;
  out << "resolution " << world.geom.resolution << "\n";
  out << "size " << world.geom.cols << " " << world.geom.rows << "\n";
  for (int r = world.geom.rows - 1; r >= 0; --r) {
    for (int c = 0; c < world.geom.cols; ++c)
      out << (world.solid(r, c) ? '#' : '.');
    out << "\n";
  }
  return out.str();
}

void save_world(const World& world, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write world file: " + path);
  out << world_to_text(world);
}

bool is_solid(const World& world, const Vec2& point) {
  const auto cell = world.geom.try_cell_at(point);
  if (!cell) return true;
  return world.solid_at(*cell);
}

World generate_maze(double width_m, double height_m, double resolution,
                    uint64_t seed, const MazeOptions& opts) {
  if (width_m <= 0.0 || height_m <= 0.0 || resolution <= 0.0)
    throw std::invalid_argument("maze dimensions must be positive");

  const int cols = static_cast<int>(std::lround(width_m / resolution));
  const int rows = static_cast<int>(std::lround(height_m / resolution));
  if (std::abs(cols * resolution - width_m) > 1e-6 ||
      std::abs(rows * resolution - height_m) > 1e-6)
    throw std::invalid_argument("maze dimensions must be whole cell counts");

  const int corridor = static_cast<int>(std::lround(opts.corridor_m / resolution));
  const int wall = std::max(1, static_cast<int>(std::lround(opts.wall_m / resolution)));
  if (corridor < 4)
    throw std::invalid_argument("corridor narrower than 4 cells");

  const int pitch = corridor + wall;
  const int nx = (cols - wall) / pitch;
  const int ny = (rows - wall) / pitch;
  if (nx < 1 || ny < 1)
    throw std::invalid_argument("dimensions too small for one corridor");

  // Center the lattice so the leftover margin pads the outer wall evenly.
  const int off_x = (cols - (nx * pitch + wall)) / 2;
  const int off_y = (rows - (ny * pitch + wall)) / 2;

  World w;
  {
    std::ostringstream nm;
    nm << "maze" << width_m << "x" << height_m << "-s" << seed;
    w.name = nm.str();
  }
  w.geom = GridGeometry{Vec2::Zero(), resolution, cols, rows};
  w.solid.setOnes(rows, cols);

  auto carve = [&w](int c0, int r0, int wc, int hc) {
    for (int r = r0; r < r0 + hc; ++r)
      for (int c = c0; c < c0 + wc; ++c) w.solid(r, c) = 0;
  };
  auto cell_base = [&](int ix, int iy) {
    return std::pair<int, int>(off_x + wall + ix * pitch,
                               off_y + wall + iy * pitch);
  };

  // Depth-first backtracker over the logical lattice.
  Rng rng(seed);
  std::vector<uint8_t> visited(static_cast<size_t>(nx) * ny, 0);
  std::vector<std::pair<int, int>> stack;
  auto idx = [nx](int ix, int iy) { return iy * nx + ix; };

  stack.emplace_back(0, 0);
  visited[idx(0, 0)] = 1;
  {
    auto [bx, by] = cell_base(0, 0);
    carve(bx, by, corridor, corridor);
  }

  const int dx[4] = {1, -1, 0, 0};
  const int dy[4] = {0, 0, 1, -1};
  while (!stack.empty()) {
    auto [ix, iy] = stack.back();
    int order[4] = {0, 1, 2, 3};
    for (int i = 3; i > 0; --i) std::swap(order[i], order[rng.uniform_int(i + 1)]);

    bool advanced = false;
    for (int k = 0; k < 4 && !advanced; ++k) {
      const int jx = ix + dx[order[k]];
      const int jy = iy + dy[order[k]];
      if (jx < 0 || jx >= nx || jy < 0 || jy >= ny || visited[idx(jx, jy)])
        continue;
      visited[idx(jx, jy)] = 1;
      auto [bx, by] = cell_base(jx, jy);
      carve(bx, by, corridor, corridor);
      // Open the wall segment between the two logical cells.
      auto [ax, ay] = cell_base(ix, iy);
      if (jx != ix) {
        carve(std::min(ax, bx) + corridor, ay, wall, corridor);
      } else {
        carve(ax, std::min(ay, by) + corridor, corridor, wall);
      }
      stack.emplace_back(jx, jy);
      advanced = true;
    }
    if (!advanced) stack.pop_back();
  }

  // Optional braiding: open extra interior walls to create loops.
  if (opts.braid > 0.0) {
    for (int iy = 0; iy < ny; ++iy) {
      for (int ix = 0; ix < nx; ++ix) {
        if (ix + 1 < nx && rng.uniform01() < opts.braid) {
          auto [ax, ay] = cell_base(ix, iy);
          carve(ax + corridor, ay, wall, corridor);
        }
        if (iy + 1 < ny && rng.uniform01() < opts.braid) {
          auto [ax, ay] = cell_base(ix, iy);
          carve(ax, ay + corridor, corridor, wall);
        }
      }
    }
  }

  validate_closed_boundary(w);
  w.free_area_m2 = recompute_free_area(w);
  return w;
}

Pose default_start(const World& world) {
  // Nearest free cell to the world midpoint with some wall clearance, so
  // the robot does not begin flush against a wall. Falls back to the
  // best-clearance cell when nothing clears the preferred margin.
  const double want_clearance = 0.3;
  const int margin =
      static_cast<int>(std::ceil(want_clearance / world.geom.resolution));
  auto clearance_cells = [&](int r, int c) {
    int best = margin + 1;
    for (int dr = -margin; dr <= margin && best > 0; ++dr) {
      for (int dc = -margin; dc <= margin; ++dc) {
        const int rr = r + dr, cc = c + dc;
        const bool solid = rr < 0 || rr >= world.geom.rows || cc < 0 ||
                           cc >= world.geom.cols || world.solid(rr, cc);
        if (solid) best = std::min(best, std::max(std::abs(dr), std::abs(dc)) - 1);
      }
    }
    return best;  // Chebyshev rings of free cells around (r, c)
  };

  const Vec2 center(world.width_m() / 2.0, world.height_m() / 2.0);
  double best_d2 = std::numeric_limits<double>::infinity();
  CellIndex best_cell(-1, -1);
  int fallback_clearance = -1;
  CellIndex fallback_cell(-1, -1);
  double fallback_d2 = std::numeric_limits<double>::infinity();
  for (int r = 0; r < world.geom.rows; ++r) {
    for (int c = 0; c < world.geom.cols; ++c) {
      if (world.solid(r, c)) continue;
      const double d2 =
          (world.geom.cell_center(CellIndex(c, r)) - center).squaredNorm();
      const int clear = clearance_cells(r, c);
      if (clear > fallback_clearance ||
          (clear == fallback_clearance && d2 < fallback_d2)) {
        fallback_clearance = clear;
        fallback_cell = CellIndex(c, r);
        fallback_d2 = d2;
      }
      if (clear >= margin && d2 < best_d2) {
        best_d2 = d2;
        best_cell = CellIndex(c, r);
      }
    }
  }
  if (best_cell.x() < 0) best_cell = fallback_cell;
  if (best_cell.x() < 0)
    throw std::invalid_argument(world.name + ": world has no free cell");
  const Vec2 p = world.geom.cell_center(best_cell);
  return make_pose(p.x(), p.y(), 0.0);
}

}  // namespace explore
