#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace latcomp {

enum class Axis : int { X = 0, Y = 1, Z = 2 };

char axis_name(Axis axis);
Axis axis_from_name(char name);

struct Site {
  int x = 0;
  int y = 0;
  int z = 0;
  bool operator==(const Site&) const = default;
};

/// One shift cycle. Every mobile atom moves one site along (axis, direction);
/// all other atoms stay. A step is valid when each mobile site is occupied and
/// its destination is in bounds and either vacant or occupied by another
/// mobile atom, so each maximal mobile chain ends in a vacancy.
struct CompactionStep {
  Axis axis = Axis::X;
  int direction = -1;
  std::vector<Site> mobile;
};

/// Node of the balancing recursion. Ranges are 1-based inclusive row/plane
/// indices. `transfer` counts atoms moved across the halving boundary, signed
/// positive toward the higher-index half.
struct BalanceTreeNode {
  int depth = 0;
  Axis split_axis = Axis::Y;
  int y_lo = 1, y_hi = 1;
  int z_lo = 1, z_hi = 1;
  std::int64_t transfer = 0;
};

struct PlanStats {
  std::int64_t balance_steps = 0;
  std::int64_t row_compact_steps = 0;
  int tree_depth = 0;            // deepest node of the balance recursion
  int fallback_events = 0;       // lateral reroute steps taken
  int levels_over_bound = 0;     // tree levels that exceeded their ceil(k/2) budget
  bool balance_failed = false;   // gave up on an unroutable transfer
  std::vector<BalanceTreeNode> tree;
};

struct Schedule {
  std::vector<CompactionStep> steps;
  PlanStats stats;

  std::int64_t shift_cost() const { return static_cast<std::int64_t>(steps.size()); }
  std::int64_t flip_cost() const;  // two flips per mobile atom per step
};

std::string schedule_to_json(const Schedule& schedule);
Schedule schedule_from_json(std::string_view text);

/// Consumer for planner output. Streaming keeps large Monte-Carlo runs from
/// materializing whole schedules.
class StepSink {
 public:
  virtual ~StepSink() = default;
  virtual void on_step(const CompactionStep& step) = 0;
};

/// Sink that materializes a Schedule.
class CollectSink : public StepSink {
 public:
  void on_step(const CompactionStep& step) override { schedule.steps.push_back(step); }
  Schedule schedule;
};

}  // namespace latcomp
