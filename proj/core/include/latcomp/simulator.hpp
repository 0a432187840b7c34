#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "latcomp/lattice.hpp"
#include "latcomp/schedule.hpp"

namespace latcomp {

class InvalidStep : public std::runtime_error {
 public:
  explicit InvalidStep(const std::string& what, std::int64_t index = -1)
      : std::runtime_error(what), step_index(index) {}
  std::int64_t step_index;
};

struct StepTraceRow {
  std::int64_t step = 0;
  Axis axis = Axis::X;
  int direction = 0;
  std::int64_t mobile_count = 0;
};

struct ExecutionReport {
  OccupancyGrid final_grid;
  std::int64_t shift_cost = 0;
  std::int64_t flip_cost = 0;
  bool ok = true;
  std::int64_t failed_step = -1;
  std::string error;
};

/// Apply one step, validating it against the current occupancy. Throws
/// InvalidStep on a vacant mobile site, an out-of-bounds destination, a
/// duplicate mobile entry, or a chain that does not end in a vacancy.
OccupancyGrid apply_step(const OccupancyGrid& grid, const CompactionStep& step);

/// Apply a whole schedule. Stops at the first invalid step and reports it;
/// never throws.
ExecutionReport execute(OccupancyGrid grid, const Schedule& schedule,
                        std::vector<StepTraceRow>* trace = nullptr);

/// Executor usable as a planner sink; validates and applies each step as it
/// is emitted. Validation is independent of the planner's own bookkeeping.
class ExecutingSink : public StepSink {
 public:
  explicit ExecutingSink(OccupancyGrid grid);
  void on_step(const CompactionStep& step) override;  // throws InvalidStep

  const OccupancyGrid& grid() const { return grid_; }
  std::int64_t shift_cost() const { return steps_; }
  std::int64_t flip_cost() const { return 2 * moved_; }

 private:
  OccupancyGrid grid_;
  std::vector<std::uint8_t> mark_;
  std::int64_t steps_ = 0;
  std::int64_t moved_ = 0;
};

struct HeatingBudget {
  double total_j = 0.0;
  bool recool_needed = false;
  std::int64_t recool_at_step = -1;  // first 1-based step crossing the threshold
};

/// Accumulated heating is linear in the number of shifts. A non-positive
/// threshold disables the recool marker.
HeatingBudget heating_budget(const ExecutionReport& report, double per_shift_energy_j,
                             double recool_threshold_j = 0.0);

/// Motional excitation caused by one site-selective flip, in units of the
/// vibrational quantum, for a 30 us addressing-beam flip. Used only for
/// budget estimates; flips carry no time cost in schedules.
inline constexpr double flip_heating_quanta_per_op = 1e-4;
inline constexpr double flip_duration_s = 30e-6;

std::string report_to_json(const ExecutionReport& report);
std::string trace_to_csv(const std::vector<StepTraceRow>& trace);

}  // namespace latcomp
