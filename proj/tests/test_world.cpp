#include "explore/world.hpp"

#include "explore/random.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace explore;

namespace {

World from_text(const std::string& text, const std::string& name = "test") {
  std::istringstream in(text);
  return parse_world(in, name);
}

}  // namespace

TEST_CASE("fully solid world has zero free area") {
  const World w = from_text(
      "resolution 0.5\n"
      "size 3 3\n"
      "###\n"
      "###\n"
      "###\n");
  CHECK(w.free_area_m2 == 0.0);
  CHECK(w.geom.cols == 3);
  CHECK(w.geom.rows == 3);
}

TEST_CASE("free area counts open cells") {
  const World w = from_text(
      "resolution 0.5\n"
      "size 4 4\n"
      "####\n"
      "#..#\n"
      "#..#\n"
      "####\n");
  CHECK(w.free_area_m2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("parse rejects malformed input") {
  CHECK_THROWS_AS(from_text("resolution -1\nsize 2 2\n##\n##\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(from_text("size 2 2\n##\n##\n"), std::invalid_argument);
  CHECK_THROWS_AS(from_text("resolution 0.5\nsize 3 2\n###\n##\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(from_text("resolution 0.5\nsize 2 2\n##\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(from_text("resolution 0.5\nsize 2 2\n#x\n##\n"),
                  std::invalid_argument);
}

TEST_CASE("parse rejects an open boundary") {
  CHECK_THROWS_AS(from_text(
                      "resolution 0.5\n"
                      "size 3 3\n"
                      "#.#\n"
                      "#.#\n"
                      "###\n"),
                  std::invalid_argument);
}

TEST_CASE("file row zero is the top row") {
  const World w = from_text(
      "resolution 1\n"
      "size 3 3\n"
      "###\n"
      "#.#\n"
      "###\n");
  // The single free cell is at column 1, row 1 (middle either way here);
  // check an asymmetric case too.
  const World w2 = from_text(
      "resolution 1\n"
      "size 4 3\n"
      "####\n"
      "#..#\n"
      "####\n");
  CHECK(!w2.solid(1, 1));
  CHECK(!w2.solid(1, 2));
  CHECK(w.solid(0, 0));
}

TEST_CASE("is_solid uses the closed-world and floor conventions") {
  const World w = from_text(
      "resolution 0.5\n"
      "size 4 4\n"
      "####\n"
      "#.##\n"
      "#..#\n"
      "####\n");
  CHECK(is_solid(w, Vec2(-0.1, 0.5)));
  CHECK(is_solid(w, Vec2(5.0, 0.5)));
  CHECK(is_solid(w, Vec2(0.25, 0.25)));    // '#' cell center
  CHECK(!is_solid(w, Vec2(0.75, 0.75)));   // '.' cell center
  // x = 1.0 is the shared boundary of columns 1 and 2; the higher-index
  // cell owns it. At row 1 column 2 is free, at row 2 column 2 is solid.
  CHECK(!is_solid(w, Vec2(1.0, 0.75)));
  CHECK(is_solid(w, Vec2(1.0, 1.25)));
}

TEST_CASE("is_solid matches direct raster indexing on random points") {
  const World w = generate_maze(4.0, 4.0, 0.1, 99, MazeOptions{0.5, 0.2, 0.0});
  Rng rng(7);
  for (int i = 0; i < 10000; ++i) {
    const Vec2 p(rng.uniform(0.0, w.width_m() - 1e-9),
                 rng.uniform(0.0, w.height_m() - 1e-9));
    const CellIndex c = w.geom.cell_at(p);
    CHECK(is_solid(w, p) == w.solid_at(c));
  }
}

TEST_CASE("world text round-trips bit-exactly") {
  const std::string text =
      "resolution 0.5\n"
      "size 4 4\n"
      "####\n"
      "#.##\n"
      "#..#\n"
      "####\n";
  CHECK(world_to_text(from_text(text)) == text);

  const World maze = generate_maze(4.0, 4.0, 0.1, 3, MazeOptions{0.5, 0.2, 0.0});
  CHECK(world_to_text(from_text(world_to_text(maze))) == world_to_text(maze));
}

TEST_CASE("maze generation is deterministic in the seed") {
  const MazeOptions opts{1.0, 0.2, 0.3};
  const World a = generate_maze(8.0, 8.0, 0.05, 42, opts);
  const World b = generate_maze(8.0, 8.0, 0.05, 42, opts);
  const World c = generate_maze(8.0, 8.0, 0.05, 43, opts);
  CHECK(world_to_text(a) == world_to_text(b));
  CHECK(world_to_text(a) != world_to_text(c));
}

TEST_CASE("generated mazes are connected and closed") {
  for (uint64_t seed : {1, 2, 3, 4, 5}) {
    const World w = generate_maze(20.0, 20.0, 0.05, seed);
    CHECK(oracles::fully_connected(w));
    CHECK(w.free_area_m2 > 0.0);
    // closed boundary is validated on construction; spot-check anyway
    CHECK(w.solid(0, 0));
    CHECK(w.solid(w.geom.rows - 1, w.geom.cols - 1));
  }
}

TEST_CASE("maze generation rejects impossible requests") {
  CHECK_THROWS_AS(generate_maze(1.0, 1.0, 0.05, 1, MazeOptions{4.0, 0.2, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(generate_maze(2.0, 2.0, 0.05, 1, MazeOptions{0.1, 0.05, 0.0}),
                  std::invalid_argument);  // corridor narrower than 4 cells
  CHECK_THROWS_AS(generate_maze(-1.0, 2.0, 0.05, 1), std::invalid_argument);
}

TEST_CASE("bundled maze asset matches an independent cell count") {
  const std::string path = std::string(EXPLORE_ASSET_DIR) + "/maze20.txt";
  const World w = load_world(path);
  CHECK(w.width_m() == doctest::Approx(20.0));
  CHECK(w.height_m() == doctest::Approx(20.0));
  CHECK(oracles::fully_connected(w));

  // Independent count straight off the file text.
  std::ifstream in(path);
  REQUIRE(in);
  std::string line;
  std::getline(in, line);  // resolution
  std::getline(in, line);  // size
  long dots = 0;
  while (std::getline(in, line))
    dots += std::count(line.begin(), line.end(), '.');
  CHECK(w.free_area_m2 ==
        doctest::Approx(dots * 0.05 * 0.05).epsilon(1e-12));
}

TEST_CASE("default start is a free cell near the middle") {
  const World w = generate_maze(8.0, 8.0, 0.05, 11);
  const Pose start = default_start(w);
  CHECK(!is_solid(w, start.position()));
  CHECK((start.position() - Vec2(4.0, 4.0)).norm() < 2.0);
}
