#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <latcomp/lattice.hpp>
#include <latcomp/planner.hpp>
#include <latcomp/simulator.hpp>

using namespace latcomp;

namespace {

OccupancyGrid from_bits(std::initializer_list<int> bits) {
  OccupancyGrid g = OccupancyGrid::line(static_cast<int>(bits.size()));
  int x = 0;
  for (int b : bits) g.set(x++, 0, 0, b != 0);
  return g;
}

OccupancyGrid from_rows(std::initializer_list<std::initializer_list<int>> rows) {
  const int ny = static_cast<int>(rows.size());
  const int nx = static_cast<int>(rows.begin()->size());
  OccupancyGrid g = OccupancyGrid::plane(nx, ny);
  int y = 0;
  for (const auto& row : rows) {
    int x = 0;
    for (int b : row) g.set(x++, y, 0, b != 0);
    ++y;
  }
  return g;
}

// Oracle for the 1-D cost: vacancies that still have an atom to their right.
std::int64_t vacancies_with_atom_right(const OccupancyGrid& g, int y = 0, int z = 0) {
  int last = -1;
  for (int x = 0; x < g.extent(0); ++x)
    if (g.occupied(x, y, z)) last = x;
  std::int64_t v = 0;
  for (int x = 0; x < last; ++x)
    if (!g.occupied(x, y, z)) ++v;
  return v;
}

int ceil_log2(int n) {
  int d = 0;
  while ((1 << d) < n) ++d;
  return d;
}

}  // namespace

TEST_CASE("compact_1d on the worked examples") {
  CHECK(compact_1d(from_bits({1, 1, 1, 1})).shift_cost() == 0);
  CHECK(compact_1d(from_bits({})).shift_cost() == 0);

  {
    auto g = from_bits({1, 0, 1, 0, 1});
    auto s = compact_1d(g);
    CHECK(s.shift_cost() == 2);
    auto r = execute(g, s);
    REQUIRE(r.ok);
    CHECK(is_compacted(r.final_grid));
    CHECK(r.final_grid.occupied(2));
    CHECK_FALSE(r.final_grid.occupied(3));
  }
  {
    auto g = from_bits({0, 0, 0, 1});
    auto s = compact_1d(g);
    CHECK(s.shift_cost() == 3);
    auto r = execute(g, s);
    REQUIRE(r.ok);
    CHECK(r.final_grid.occupied(0));
    CHECK(r.final_grid.atom_count() == 1);
  }
  CHECK_THROWS_AS(compact_1d(OccupancyGrid::plane(2, 2)), std::invalid_argument);
}

TEST_CASE("compact_1d cost equals the vacancy oracle") {
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    const double p = 0.2 + 0.2 * (seed % 4);
    auto g = random_fill(1, {97, 1, 1}, p, seed);
    CHECK(compact_1d(g).shift_cost() == vacancies_with_atom_right(g));
  }
}

TEST_CASE("compact_1d mean cost tracks (1-p) n") {
  // single large seeded instance: cost is within 5 binomial sigma of n/2
  auto g = random_fill(1, {10000, 1, 1}, 0.5, 271828);
  const double cost = static_cast<double>(compact_1d(g).shift_cost());
  CHECK(std::abs(cost - 5000.0) < 5.0 * std::sqrt(10000 * 0.25));
}

TEST_CASE("balance_2d on the worked examples") {
  SUBCASE("already balanced rows move nothing") {
    auto g = from_rows({{1, 0, 1}, {0, 1, 1}});
    CHECK(balance_2d(g).shift_cost() == 0);
  }
  SUBCASE("2x2 with counts (2,0) moves one atom down") {
    auto g = from_rows({{1, 1}, {0, 0}});
    auto s = balance_2d(g);
    CHECK(s.shift_cost() == 1);
    auto r = execute(g, s);
    REQUIRE(r.ok);
    const auto counts = row_counts(r.final_grid);
    CHECK(counts[0] == 1);
    CHECK(counts[1] == 1);
  }
  SUBCASE("7x7 recursion depth is ceil(log2 7) = 3") {
    auto g = random_fill(2, {7, 7, 1}, 0.5, 1234);
    auto s = balance_2d(g);
    CHECK(s.stats.tree_depth == 3);
  }
}

TEST_CASE("balance_2d leaves all row counts within one") {
  for (std::uint64_t seed = 1; seed <= 120; ++seed) {
    const double p = 0.25 + 0.25 * (seed % 3);
    auto g = random_fill(2, {13, 13, 1}, p, seed * 7 + 1);
    auto s = balance_2d(g);
    auto r = execute(g, s);
    REQUIRE(r.ok);
    const auto counts = row_counts(r.final_grid);
    const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
    CHECK(*hi - *lo <= 1);
    CHECK(r.final_grid.atom_count() == g.atom_count());
    CHECK_FALSE(s.stats.balance_failed);
  }
}

TEST_CASE("row_compact merges per-row compaction into shared steps") {
  SUBCASE("already left-justified rows move nothing") {
    auto g = from_rows({{1, 1, 0}, {1, 0, 0}});
    CHECK(row_compact(g).shift_cost() == 0);
  }
  SUBCASE("rows [1,0,1] and [0,1,1] finish in one shared step") {
    // per-row traces: both rows clear their single interior vacancy at once
    auto g = from_rows({{1, 0, 1}, {0, 1, 1}});
    auto s = row_compact(g);
    CHECK(s.shift_cost() == 1);
    auto r = execute(g, s);
    REQUIRE(r.ok);
    CHECK(is_compacted(r.final_grid));
  }
  SUBCASE("shared cost is the maximum single-row cost") {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
      auto g = random_fill(2, {19, 6, 1}, 0.5, seed * 3 + 2);
      std::int64_t worst = 0;
      for (int y = 0; y < 6; ++y) worst = std::max(worst, vacancies_with_atom_right(g, y));
      CHECK(row_compact(g).shift_cost() == worst);
    }
  }
}

TEST_CASE("balance_3d on the worked examples") {
  SUBCASE("balanced cube moves nothing") {
    OccupancyGrid g = OccupancyGrid::box(3, 2, 2);
    for (int z = 0; z < 2; ++z)
      for (int y = 0; y < 2; ++y) g.set(0, y, z, true);
    CHECK(balance_3d(g).shift_cost() == 0);
  }
  SUBCASE("3x3x3 depth is 2 ceil(log2 3) = 4") {
    auto g = random_fill(3, {3, 3, 3}, 0.5, 55);
    CHECK(balance_3d(g).stats.tree_depth == 4);
  }
  SUBCASE("2x2x2 with one filled xy plane ends with one atom per row") {
    OccupancyGrid g = OccupancyGrid::box(2, 2, 2);
    for (int y = 0; y < 2; ++y)
      for (int x = 0; x < 2; ++x) g.set(x, y, 0, true);
    auto s = balance_3d(g);
    auto r = execute(g, s);
    REQUIRE(r.ok);
    const auto counts = row_counts(r.final_grid);
    for (auto c : counts) CHECK(c == 1);
  }
}

TEST_CASE("balance_3d leaves all row counts within one") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    auto g = random_fill(3, {6, 6, 6}, 0.5, seed * 11 + 3);
    auto s = balance_3d(g);
    auto r = execute(g, s);
    REQUIRE(r.ok);
    const auto counts = row_counts(r.final_grid);
    const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
    CHECK(*hi - *lo <= 1);
    CHECK_FALSE(s.stats.balance_failed);
  }
}

TEST_CASE("plan dispatches and compacts every dimensionality") {
  SUBCASE("1-D plan is compact_1d") {
    auto g = random_fill(1, {50, 1, 1}, 0.5, 77);
    auto a = plan(g);
    auto b = compact_1d(g);
    CHECK(a.shift_cost() == b.shift_cost());
    CHECK(a.steps.size() == b.steps.size());
  }
  SUBCASE("random instances end compacted with conserved atoms") {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      for (int dims : {2, 3}) {
        const int n = dims == 2 ? 12 : 6;
        auto g = random_fill(dims, {n, n, dims == 3 ? n : 1}, 0.5, seed * 13 + dims);
        ExecutingSink sink(g);
        auto stats = plan_into(g, sink);
        CHECK(is_compacted(sink.grid()));
        CHECK(sink.grid().atom_count() == g.atom_count());
        const int expected_depth = dims == 2 ? ceil_log2(n) : 2 * ceil_log2(n);
        CHECK(stats.tree_depth == expected_depth);
        const std::int64_t slack = 2 * dims * ceil_log2(n);
        CHECK(sink.shift_cost() <= worst_case_bound(dims, n) + slack);
      }
    }
  }
}

TEST_CASE("schedule json round-trip") {
  auto g = random_fill(2, {6, 6, 1}, 0.5, 31);
  auto s = plan(g);
  const auto text = schedule_to_json(s);
  auto back = schedule_from_json(text);
  REQUIRE(back.steps.size() == s.steps.size());
  for (std::size_t i = 0; i < s.steps.size(); ++i) {
    CHECK(back.steps[i].axis == s.steps[i].axis);
    CHECK(back.steps[i].direction == s.steps[i].direction);
    CHECK(back.steps[i].mobile == s.steps[i].mobile);
  }
  CHECK(back.stats.tree_depth == s.stats.tree_depth);
  auto report = execute(g, back);
  CHECK(report.ok);
  CHECK(is_compacted(report.final_grid));
}

TEST_CASE("worst_case_bound") {
  CHECK(worst_case_bound(1, 10) == 10);
  CHECK(worst_case_bound(2, 7) == 18);   // ceil(35/2)
  CHECK(worst_case_bound(2, 64) == 160);
  CHECK(worst_case_bound(3, 20) == 90);
  CHECK(worst_case_bound(3, 16) == 72);
  CHECK_THROWS_AS(worst_case_bound(0, 5), std::invalid_argument);
  CHECK_THROWS_AS(worst_case_bound(2, 0), std::invalid_argument);
}

TEST_CASE("planner output is deterministic") {
  auto g = random_fill(2, {16, 16, 1}, 0.5, 2024);
  const auto a = schedule_to_json(plan(g));
  const auto b = schedule_to_json(plan(g));
  CHECK(a == b);
}
