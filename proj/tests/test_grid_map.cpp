#include "explore/grid_map.hpp"

#include "explore/random.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

using namespace explore;

namespace {

GridMap small_map(int cols = 10, int rows = 10, double res = 0.05) {
  return GridMap(GridGeometry{Vec2::Zero(), res, cols, rows});
}

}  // namespace

TEST_CASE("world_to_cell follows the floor convention") {
  const GridMap map = small_map();
  CHECK(world_to_cell(map, Vec2(0.0, 0.0)) == CellIndex(0, 0));
  CHECK(world_to_cell(map, Vec2(0.07, 0.12)) == CellIndex(1, 2));
  CHECK(world_to_cell(map, Vec2(0.05, 0.0)) == CellIndex(1, 0));
  CHECK_THROWS_AS(world_to_cell(map, Vec2(0.5 + 1e-6, 0.1)),
                  std::out_of_range);
  CHECK_THROWS_AS(world_to_cell(map, Vec2(-1e-6, 0.1)), std::out_of_range);
}

TEST_CASE("one hit drives an unknown cell to 0.7") {
  GridMap map = small_map();
  const CellIndex c(3, 3);
  CHECK(probability(map, c) == 0.5);
  apply_observation(map, c, true);
  CHECK(probability(map, c) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(map.known(c));
}

TEST_CASE("a hit and a miss cancel exactly") {
  GridMap map = small_map();
  const CellIndex c(2, 5);
  apply_observation(map, c, true);
  apply_observation(map, c, false);
  CHECK(map.logodds(c) == 0.0);
  CHECK(probability(map, c) == 0.5);
  CHECK(map.known(c));  // still observed
}

TEST_CASE("repeated hits saturate at the clamp") {
  GridMap map = small_map();
  const CellIndex c(1, 1);
  for (int i = 0; i < 50; ++i) apply_observation(map, c, true);
  CHECK(map.logodds(c) == map.params().l_max);
  CHECK(probability(map, c) ==
        doctest::Approx(1.0 - 1.0 / (1.0 + std::exp(3.5))).epsilon(1e-12));
  for (int i = 0; i < 50; ++i) apply_observation(map, c, false);
  CHECK(map.logodds(c) == map.params().l_min);
}

TEST_CASE("probability closed forms") {
  GridMap map = small_map();
  const CellIndex c(0, 0);
  CHECK(probability(map, c) == 0.5);

  apply_observation(map, c, false);  // logodds = -ln(7/3)
  CHECK(probability(map, c) == doctest::Approx(0.3).epsilon(1e-12));

  CHECK_THROWS_AS(probability(map, CellIndex(99, 0)), std::out_of_range);
}

TEST_CASE("probability is strictly increasing in logodds") {
  GridMap map = small_map();
  double prev = -1.0;
  // distinct pre-clamp log-odds levels on fresh cells
  for (int k = 0; k <= 4; ++k) {
    const CellIndex c(k, 0);
    for (int i = 0; i < k; ++i) apply_observation(map, c, true);
    const double p = probability(map, c);
    CHECK(p > prev);
    prev = p;
  }
}

TEST_CASE("classification uses the hysteresis band") {
  GridMap map = small_map();
  CHECK(classify(map, CellIndex(0, 0)) == CellClass::Unknown);

  CellIndex free_cell(1, 0);
  apply_observation(map, free_cell, false);  // p = 0.3 < 0.35
  CHECK(classify(map, free_cell) == CellClass::Free);

  CellIndex occ_cell(2, 0);
  apply_observation(map, occ_cell, true);  // p = 0.7 >= 0.65
  CHECK(classify(map, occ_cell) == CellClass::Occupied);

  CellIndex mid_cell(3, 0);
  apply_observation(map, mid_cell, true);
  apply_observation(map, mid_cell, false);  // p = 0.5, known
  CHECK(map.known(mid_cell));
  CHECK(classify(map, mid_cell) == CellClass::Unknown);
}

TEST_CASE("frontier requires a free cell touching unknown") {
  GridMap map = small_map();
  CHECK(!is_frontier(map, CellIndex(4, 4)));  // fully unknown map

  // free cell surrounded by free cells
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx)
      apply_observation(map, CellIndex(4 + dx, 4 + dy), false);
  CHECK(!is_frontier(map, CellIndex(4, 4)));
  // its ring still touches unknown space
  CHECK(is_frontier(map, CellIndex(3, 3)));
}

TEST_CASE("frontier classification matches a brute-force rescan") {
  Rng rng(123);
  for (int trial = 0; trial < 20; ++trial) {
    GridMap map = small_map(50, 50);
    for (int i = 0; i < 800; ++i) {
      const CellIndex c(rng.uniform_int(50), rng.uniform_int(50));
      apply_observation(map, c, rng.uniform01() < 0.4);
    }
    for (int r = 0; r < 50; ++r)
      for (int c = 0; c < 50; ++c)
        CHECK(is_frontier(map, CellIndex(c, r)) ==
              oracles::brute_frontier(map, CellIndex(c, r)));
  }
}

TEST_CASE("coverage counts known cells") {
  GridMap map = small_map(20, 20);
  CHECK(coverage_m2(map) == 0.0);
  for (int i = 0; i < 100; ++i)
    apply_observation(map, CellIndex(i % 20, i / 20), i % 2 == 0);
  CHECK(coverage_m2(map) == doctest::Approx(0.25).epsilon(1e-12));
  // re-observing does not change coverage
  apply_observation(map, CellIndex(0, 0), true);
  CHECK(coverage_m2(map) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("interleavings of the same observations agree inside the clamp") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int hits = rng.uniform_int(3);
    const int misses = rng.uniform_int(3);
    std::vector<uint8_t> seq;
    for (int i = 0; i < hits; ++i) seq.push_back(1);
    for (int i = 0; i < misses; ++i) seq.push_back(0);

    GridMap a = small_map();
    for (uint8_t s : seq) apply_observation(a, CellIndex(0, 0), s != 0);

    for (int i = static_cast<int>(seq.size()) - 1; i > 0; --i)
      std::swap(seq[i], seq[rng.uniform_int(i + 1)]);
    GridMap b = small_map();
    for (uint8_t s : seq) apply_observation(b, CellIndex(0, 0), s != 0);

    CHECK(a.logodds(CellIndex(0, 0)) ==
          doctest::Approx(b.logodds(CellIndex(0, 0))).epsilon(1e-12));
  }
}

TEST_CASE("pgm export writes the expected header and values") {
  GridMap map = small_map(4, 3, 0.1);
  apply_observation(map, CellIndex(0, 0), false);  // free
  apply_observation(map, CellIndex(1, 0), true);   // occupied

  const auto dir = std::filesystem::temp_directory_path() / "explore_pgm_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "map.pgm").string();
  save_pgm(map, path);

  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::string magic;
  int cols, rows, maxval;
  in >> magic >> cols >> rows >> maxval;
  in.get();
  CHECK(magic == "P5");
  CHECK(cols == 4);
  CHECK(rows == 3);
  std::vector<uint8_t> data(12);
  in.read(reinterpret_cast<char*>(data.data()), 12);
  // top row (row 2) first; observed cells are in raster row 0 = last line
  CHECK(data[0] == 205);
  CHECK(data[8] == 254);
  CHECK(data[9] == 0);

  std::ifstream meta(path + ".meta");
  REQUIRE(meta);
  std::string key;
  double res;
  meta >> key >> res;
  CHECK(key == "resolution");
  CHECK(res == doctest::Approx(0.1));
}
