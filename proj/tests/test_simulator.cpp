#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

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

std::vector<int> bits_of(const OccupancyGrid& g) {
  std::vector<int> out;
  for (int x = 0; x < g.extent(0); ++x) out.push_back(g.occupied(x) ? 1 : 0);
  return out;
}

// Independent reference for the 1-D compaction outcome: repeatedly shift
// everything right of the leftmost interior vacancy, directly on the bit
// array.
std::vector<int> reference_compact(std::vector<int> bits) {
  while (true) {
    int v = -1;
    int last_atom = -1;
    for (std::size_t i = 0; i < bits.size(); ++i)
      if (bits[i]) last_atom = static_cast<int>(i);
    for (std::size_t i = 0; i < bits.size(); ++i)
      if (!bits[i] && static_cast<int>(i) < last_atom) {
        v = static_cast<int>(i);
        break;
      }
    if (v < 0) return bits;
    for (int i = v; i + 1 < static_cast<int>(bits.size()); ++i) bits[i] = bits[i + 1];
    bits.back() = 0;
  }
}

}  // namespace

TEST_CASE("apply_step basics") {
  SUBCASE("empty mobile set is the identity") {
    auto g = from_bits({1, 0, 1});
    auto out = apply_step(g, {Axis::X, +1, {}});
    CHECK(out == g);
  }
  SUBCASE("single move") {
    auto g = from_bits({1, 0});
    auto out = apply_step(g, {Axis::X, +1, {{0, 0, 0}}});
    CHECK(bits_of(out) == std::vector<int>{0, 1});
  }
  SUBCASE("chain into a vacancy") {
    auto g = from_bits({1, 1, 0});
    auto out = apply_step(g, {Axis::X, +1, {{0, 0, 0}, {1, 0, 0}}});
    CHECK(bits_of(out) == std::vector<int>{0, 1, 1});
  }
  SUBCASE("atom count is conserved") {
    auto g = random_fill(2, {6, 6, 1}, 0.5, 5);
    CompactionStep step{Axis::Y, +1, {}};
    for (int x = 0; x < 6; ++x)
      if (g.occupied(x, 0) && !g.occupied(x, 1)) step.mobile.push_back({x, 0, 0});
    auto out = apply_step(g, step);
    CHECK(out.atom_count() == g.atom_count());
  }
}

TEST_CASE("apply_step rejects invalid steps") {
  auto g = from_bits({1, 1, 0, 1});
  CHECK_THROWS_AS(apply_step(g, {Axis::X, +1, {{2, 0, 0}}}), InvalidStep);        // vacant
  CHECK_THROWS_AS(apply_step(g, {Axis::X, +1, {{3, 0, 0}}}), InvalidStep);        // off the edge
  CHECK_THROWS_AS(apply_step(g, {Axis::X, +1, {{0, 0, 0}}}), InvalidStep);        // blocked chain
  CHECK_THROWS_AS(apply_step(g, {Axis::X, -1, {{1, 0, 0}}}), InvalidStep);        // dest occupied
  CHECK_THROWS_AS(apply_step(g, {Axis::X, +1, {{1, 0, 0}, {1, 0, 0}}}), InvalidStep);  // dup
  CHECK_THROWS_AS(apply_step(g, {Axis::X, +2, {{1, 0, 0}}}), InvalidStep);        // bad dir
  CHECK_THROWS_AS(apply_step(g, {Axis::Y, +1, {{1, 0, 0}}}), InvalidStep);        // 1-D has no y
}

TEST_CASE("execute against the traced example") {
  auto g = from_bits({1, 0, 1, 0, 1});
  auto schedule = compact_1d(g);
  std::vector<StepTraceRow> trace;
  auto report = execute(g, schedule, &trace);
  CHECK(report.ok);
  CHECK(report.shift_cost == 2);
  CHECK(report.flip_cost == 6);  // mobile sets {2,4} then {3}
  CHECK(bits_of(report.final_grid) == std::vector<int>{1, 1, 1, 0, 0});
  REQUIRE(trace.size() == 2);
  CHECK(trace[0].mobile_count == 2);
  CHECK(trace[1].mobile_count == 1);
  CHECK(!trace_to_csv(trace).empty());
}

TEST_CASE("execute reports the first invalid step") {
  auto g = from_bits({1, 0, 0});
  Schedule bad;
  bad.steps.push_back({Axis::X, +1, {{0, 0, 0}}});
  bad.steps.push_back({Axis::X, +1, {{0, 0, 0}}});  // now vacant
  auto report = execute(g, bad);
  CHECK_FALSE(report.ok);
  CHECK(report.failed_step == 1);
  CHECK(report.shift_cost == 1);
  CHECK_FALSE(report.error.empty());
}

TEST_CASE("empty schedule leaves the grid unchanged") {
  auto g = random_fill(2, {5, 5, 1}, 0.5, 9);
  auto report = execute(g, Schedule{});
  CHECK(report.ok);
  CHECK(report.shift_cost == 0);
  CHECK(report.flip_cost == 0);
  CHECK(report.final_grid == g);
}

TEST_CASE("executor matches the direct 1-D reference on random lines") {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    auto g = random_fill(1, {40, 1, 1}, 0.5, seed);
    auto schedule = compact_1d(g);
    auto report = execute(g, schedule);
    REQUIRE(report.ok);
    CHECK(bits_of(report.final_grid) == reference_compact(bits_of(g)));
  }
}

TEST_CASE("planner output is valid on random instances") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    for (double p : {0.3, 0.5, 0.7}) {
      auto g = random_fill(2, {16, 16, 1}, p, seed);
      ExecutingSink sink(g);
      CHECK_NOTHROW(plan_into(g, sink));
      CHECK(sink.grid().atom_count() == g.atom_count());
      CHECK(is_compacted(sink.grid()));
    }
  }
}

TEST_CASE("heating budget") {
  ExecutionReport report{.final_grid = OccupancyGrid::line(2)};
  SUBCASE("zero shifts") {
    auto b = heating_budget(report, 1.5e-30);
    CHECK(b.total_j == 0.0);
    CHECK_FALSE(b.recool_needed);
  }
  SUBCASE("linear in the shift count") {
    report.shift_cost = 100;
    auto b = heating_budget(report, 2.0e-30);
    CHECK(b.total_j == doctest::Approx(2.0e-28));
    CHECK_FALSE(b.recool_needed);
  }
  SUBCASE("recool marker lands at the crossing step") {
    report.shift_cost = 100;
    auto b = heating_budget(report, 1.0e-30, 25.5e-30);
    CHECK(b.recool_needed);
    CHECK(b.recool_at_step == 26);
  }
  SUBCASE("negative per-shift energy is rejected") {
    CHECK_THROWS_AS(heating_budget(report, -1.0), std::invalid_argument);
  }
}

TEST_CASE("report json carries costs and the final grid") {
  auto g = from_bits({1, 0, 1});
  auto report = execute(g, compact_1d(g));
  const auto text = report_to_json(report);
  CHECK(text.find("\"shift_cost\": 1") != std::string::npos);
  CHECK(text.find("\"is_compacted\": true") != std::string::npos);
}
