#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <latcomp/lattice.hpp>

using namespace latcomp;

namespace {

OccupancyGrid from_bits(std::initializer_list<int> bits) {
  OccupancyGrid g = OccupancyGrid::line(static_cast<int>(bits.size()));
  int x = 0;
  for (int b : bits) g.set(x++, 0, 0, b != 0);
  return g;
}

}  // namespace

TEST_CASE("grid construction and addressing") {
  OccupancyGrid g = OccupancyGrid::plane(4, 3);
  CHECK(g.dims() == 2);
  CHECK(g.site_count() == 12);
  CHECK(g.atom_count() == 0);
  g.set(2, 1, 0, true);
  CHECK(g.occupied(2, 1));
  CHECK(g.atom_count() == 1);
  CHECK(g.filling_factor() == doctest::Approx(1.0 / 12.0));

  CHECK_THROWS_AS(OccupancyGrid(0, {1, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(OccupancyGrid(4, {1, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(OccupancyGrid(1, {0, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(OccupancyGrid(1, {5, 2, 1}), std::invalid_argument);
}

TEST_CASE("count_atoms matches a direct tally") {
  SUBCASE("empty grid") {
    OccupancyGrid g = OccupancyGrid::plane(4, 4);
    CHECK(count_atoms(SublatticeView::whole(g)) == 0);
  }
  SUBCASE("full grid") {
    OccupancyGrid g = OccupancyGrid::plane(4, 4);
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 4; ++x) g.set(x, y, 0, true);
    CHECK(count_atoms(SublatticeView::whole(g)) == 16);
  }
  SUBCASE("seeded random fill vs per-site recount") {
    auto g = random_fill(2, {7, 7, 1}, 0.5, 20240517);
    std::int64_t tally = 0;
    for (int y = 0; y < 7; ++y)
      for (int x = 0; x < 7; ++x) tally += g.occupied(x, y) ? 1 : 0;
    CHECK(count_atoms(SublatticeView::whole(g)) == tally);
    CHECK(g.atom_count() == tally);
  }
}

TEST_CASE("disjoint views sum to the whole") {
  auto g = random_fill(3, {5, 6, 4}, 0.4, 99);
  const auto whole = count_atoms(SublatticeView::whole(g));
  std::int64_t split = count_atoms(SublatticeView(g, 1, 2, 1, 4)) +
                       count_atoms(SublatticeView(g, 3, 6, 1, 4));
  CHECK(split == whole);
  split = 0;
  for (int z = 1; z <= 4; ++z) split += count_atoms(SublatticeView(g, 1, 6, z, z));
  CHECK(split == whole);
}

TEST_CASE("view range validation") {
  auto g = random_fill(2, {4, 4, 1}, 0.5, 7);
  CHECK_THROWS_AS(SublatticeView(g, 0, 2), std::invalid_argument);
  CHECK_THROWS_AS(SublatticeView(g, 3, 2), std::invalid_argument);
  CHECK_THROWS_AS(SublatticeView(g, 1, 5), std::invalid_argument);
  CHECK_THROWS_AS(SublatticeView(g, 1, 4, 2, 1), std::invalid_argument);
}

TEST_CASE("is_compacted") {
  CHECK(is_compacted(from_bits({1, 1, 1, 0, 0})));
  CHECK_FALSE(is_compacted(from_bits({1, 0, 1})));
  CHECK(is_compacted(from_bits({0, 0, 0})));
  CHECK(is_compacted(from_bits({1, 1, 1})));

  OccupancyGrid g = OccupancyGrid::plane(5, 2);
  for (int x = 0; x < 4; ++x) g.set(x, 0, 0, true);
  for (int x = 0; x < 3; ++x) g.set(x, 1, 0, true);
  CHECK(is_compacted(g));  // counts (4,3), both left-justified
  g.set(2, 1, 0, false);   // counts (4,2)
  CHECK_FALSE(is_compacted(g));
  g.set(2, 1, 0, true);
  g.set(3, 0, 0, false);
  g.set(4, 0, 0, true);    // interior gap in row 0
  CHECK_FALSE(is_compacted(g));
}

TEST_CASE("random_fill endpoints and statistics") {
  CHECK(random_fill(1, {100, 1, 1}, 0.0, 3).atom_count() == 0);
  CHECK(random_fill(1, {100, 1, 1}, 1.0, 3).atom_count() == 100);
  CHECK_THROWS_AS(random_fill(1, {8, 1, 1}, -0.1, 1), std::invalid_argument);
  CHECK_THROWS_AS(random_fill(1, {8, 1, 1}, 1.5, 1), std::invalid_argument);

  // 10^4 sites at p = 0.5: the filling stays within the 5-sigma binomial band
  auto g = random_fill(2, {100, 100, 1}, 0.5, 42);
  const double f = g.filling_factor();
  const double sigma = 0.5 / 100.0;  // sqrt(p(1-p)/N)
  CHECK(std::abs(f - 0.5) < 5.0 * sigma);

  // deterministic per seed
  auto h = random_fill(2, {100, 100, 1}, 0.5, 42);
  CHECK(g == h);
  auto k = random_fill(2, {100, 100, 1}, 0.5, 43);
  CHECK_FALSE(g == k);
}

TEST_CASE("row_counts ordering") {
  OccupancyGrid g = OccupancyGrid::box(2, 2, 2);
  g.set(0, 0, 0, true);
  g.set(1, 0, 0, true);
  g.set(0, 1, 1, true);
  const auto counts = row_counts(g);  // ordered by (z, y)
  REQUIRE(counts.size() == 4);
  CHECK(counts[0] == 2);  // y=0,z=0
  CHECK(counts[1] == 0);
  CHECK(counts[2] == 0);
  CHECK(counts[3] == 1);  // y=1,z=1
}

TEST_CASE("grid json round-trips bit exactly") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    auto g = random_fill(3, {4, 3, 2}, 0.37, seed);
    const auto text = grid_to_json(g);
    auto back = grid_from_json(text);
    CHECK(back == g);
    CHECK(grid_to_json(back) == text);  // stable bytes
  }
  auto line = random_fill(1, {17, 1, 1}, 0.5, 11);
  CHECK(grid_from_json(grid_to_json(line)) == line);
}

TEST_CASE("grid json rejects malformed input") {
  CHECK_THROWS_AS(grid_from_json("not json"), ParseError);
  CHECK_THROWS_AS(grid_from_json("{}"), ParseError);
  CHECK_THROWS_AS(grid_from_json(R"({"dims":2,"extents":[2],"occupied":[0,0]})"), ParseError);
  CHECK_THROWS_AS(grid_from_json(R"({"dims":1,"extents":[3],"occupied":[0,1]})"), ParseError);
  CHECK_THROWS_AS(grid_from_json(R"({"dims":1,"extents":[2],"occupied":[0,2]})"), ParseError);
}
