#include "explore/render.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace explore {

namespace {

struct Color {
  uint8_t r, g, b;
};

constexpr Color kBlue{0, 0, 255};
constexpr Color kRed{255, 0, 0};
constexpr Color kGreen{0, 200, 0};
constexpr Color kYellow{255, 220, 0};

void put_pixel(Image& img, int px, int py, Color c) {
  if (px < 0 || px >= img.width || py < 0 || py >= img.height) return;
  const size_t at = 3 * (static_cast<size_t>(py) * img.width + px);
  img.rgb[at] = c.r;
  img.rgb[at + 1] = c.g;
  img.rgb[at + 2] = c.b;
}

void put_dot(Image& img, int px, int py, Color c) {
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx) put_pixel(img, px + dx, py + dy, c);
}

void draw_line(Image& img, int x0, int y0, int x1, int y1, Color c) {
  const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    put_pixel(img, x0, y0, c);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

}  // namespace

MapImage to_map_image(const GridMap& map) {
  MapImage img;
  img.geom = map.geom();
  img.gray.resize(img.geom.rows, img.geom.cols);
  const auto cls = class_grid(map);
  for (int r = 0; r < img.geom.rows; ++r) {
    for (int c = 0; c < img.geom.cols; ++c) {
      uint8_t v = 205;
      if (cls(r, c) == static_cast<uint8_t>(CellClass::Free)) v = 254;
      if (cls(r, c) == static_cast<uint8_t>(CellClass::Occupied)) v = 0;
      img.gray(r, c) = v;
    }
  }
  return img;
}

MapImage load_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open map file: " + path);
  std::string magic;
  int cols = 0, rows = 0, maxval = 0;
  in >> magic >> cols >> rows >> maxval;
  if (magic != "P5" || cols <= 0 || rows <= 0 || maxval != 255)
    throw std::invalid_argument("unsupported PGM file: " + path);
  in.get();  // single whitespace after the header

  MapImage img;
  img.geom.cols = cols;
  img.geom.rows = rows;
  img.gray.resize(rows, cols);
  for (int r = rows - 1; r >= 0; --r) {
    for (int c = 0; c < cols; ++c) {
      const int v = in.get();
      if (v < 0) throw std::invalid_argument("truncated PGM file: " + path);
      img.gray(r, c) = static_cast<uint8_t>(v);
    }
  }

  std::ifstream meta(path + ".meta");
  if (meta) {
    std::string key;
    while (meta >> key) {
      if (key == "resolution") meta >> img.geom.resolution;
      else if (key == "origin") meta >> img.geom.origin.x() >> img.geom.origin.y();
    }
  }
  return img;
}

Image render_episode(const EpisodeLog& log, const MapImage& base) {
  Image img;
  img.width = base.geom.cols;
  img.height = base.geom.rows;
  img.rgb.assign(3 * static_cast<size_t>(img.width) * img.height, 205);
  for (int r = 0; r < base.geom.rows; ++r) {
    for (int c = 0; c < base.geom.cols; ++c) {
      const uint8_t v = base.gray(r, c);
      put_pixel(img, c, base.geom.rows - 1 - r, Color{v, v, v});
    }
  }

  const auto to_px = [&](const Vec2& p, int& px, int& py) {
    const Vec2 rel = (p - base.geom.origin) / base.geom.resolution;
    px = static_cast<int>(std::floor(rel.x()));
    py = base.geom.rows - 1 - static_cast<int>(std::floor(rel.y()));
  };

  // trajectory polyline over robot-pose rows
  bool have_prev = false;
  int px0 = 0, py0 = 0;
  int first_px = 0, first_py = 0;
  int last_px = 0, last_py = 0;
  for (const auto& e : log.events) {
    if (e.kind == EventKind::Goal) continue;
    int px, py;
    to_px(e.pose.position(), px, py);
    if (have_prev) {
      draw_line(img, px0, py0, px, py, kBlue);
    } else {
      first_px = px;
      first_py = py;
    }
    px0 = px;
    py0 = py;
    last_px = px;
    last_py = py;
    have_prev = true;
  }

  for (const auto& e : log.events) {
    if (e.kind != EventKind::Goal) continue;
    int px, py;
    to_px(e.pose.position(), px, py);
    put_dot(img, px, py, kRed);
  }

  if (have_prev) {
    put_dot(img, first_px, first_py, kGreen);
    put_dot(img, last_px, last_py, kYellow);
  }
  return img;
}

void save_ppm(const Image& image, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write image file: " + path);
  out << "P6\n" << image.width << " " << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.rgb.data()),
            static_cast<std::streamsize>(image.rgb.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace explore
