#include "latcomp/simulator.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

namespace latcomp {

namespace {

std::array<int, 3> unit_offset(Axis axis, int direction) {
  std::array<int, 3> d{0, 0, 0};
  d[static_cast<std::size_t>(axis)] = direction;
  return d;
}

// Validate against the pre-step occupancy using a scratch mark buffer, then
// apply in place. The mark buffer is cleared by revisiting the mobile list so
// repeated calls stay O(|mobile|).
void validate_and_apply(OccupancyGrid& grid, std::vector<std::uint8_t>& mark,
                        const CompactionStep& step, std::int64_t step_index) {
  if (step.direction != 1 && step.direction != -1)
    throw InvalidStep("direction must be +1 or -1", step_index);
  const auto [dx, dy, dz] = unit_offset(step.axis, step.direction);

  mark.assign(mark.size(), 0);  // cheap; callers reuse the executor
  for (const auto& site : step.mobile) {
    if (!grid.in_bounds(site.x, site.y, site.z))
      throw InvalidStep("mobile site out of bounds", step_index);
    const auto idx = grid.index(site.x, site.y, site.z);
    if (!grid.cells()[idx]) throw InvalidStep("mobile site is vacant", step_index);
    if (mark[idx]) throw InvalidStep("duplicate mobile site", step_index);
    mark[idx] = 1;
  }
  for (const auto& site : step.mobile) {
    const int tx = site.x + dx, ty = site.y + dy, tz = site.z + dz;
    if (!grid.in_bounds(tx, ty, tz))
      throw InvalidStep("destination out of bounds", step_index);
    const auto tidx = grid.index(tx, ty, tz);
    if (grid.cells()[tidx] && !mark[tidx])
      throw InvalidStep("chain does not end in a vacancy", step_index);
  }
  for (const auto& site : step.mobile) grid.cells()[grid.index(site.x, site.y, site.z)] = 0;
  for (const auto& site : step.mobile)
    grid.cells()[grid.index(site.x + dx, site.y + dy, site.z + dz)] = 1;
}

}  // namespace

OccupancyGrid apply_step(const OccupancyGrid& grid, const CompactionStep& step) {
  OccupancyGrid out = grid;
  std::vector<std::uint8_t> mark(static_cast<std::size_t>(grid.site_count()), 0);
  validate_and_apply(out, mark, step, -1);
  return out;
}

ExecutionReport execute(OccupancyGrid grid, const Schedule& schedule,
                        std::vector<StepTraceRow>* trace) {
  ExecutionReport report{.final_grid = std::move(grid)};
  std::vector<std::uint8_t> mark(static_cast<std::size_t>(report.final_grid.site_count()), 0);
  for (std::size_t i = 0; i < schedule.steps.size(); ++i) {
    const auto& step = schedule.steps[i];
    try {
      validate_and_apply(report.final_grid, mark, step, static_cast<std::int64_t>(i));
    } catch (const InvalidStep& e) {
      report.ok = false;
      report.failed_step = static_cast<std::int64_t>(i);
      report.error = e.what();
      return report;
    }
    report.shift_cost += 1;
    report.flip_cost += 2 * static_cast<std::int64_t>(step.mobile.size());
    if (trace)
      trace->push_back({static_cast<std::int64_t>(i), step.axis, step.direction,
                        static_cast<std::int64_t>(step.mobile.size())});
  }
  return report;
}

ExecutingSink::ExecutingSink(OccupancyGrid grid)
    : grid_(std::move(grid)), mark_(static_cast<std::size_t>(grid_.site_count()), 0) {}

void ExecutingSink::on_step(const CompactionStep& step) {
  validate_and_apply(grid_, mark_, step, steps_);
  ++steps_;
  moved_ += static_cast<std::int64_t>(step.mobile.size());
}

HeatingBudget heating_budget(const ExecutionReport& report, double per_shift_energy_j,
                             double recool_threshold_j) {
  if (per_shift_energy_j < 0.0) throw std::invalid_argument("per-shift energy must be >= 0");
  HeatingBudget budget;
  budget.total_j = static_cast<double>(report.shift_cost) * per_shift_energy_j;
  if (recool_threshold_j > 0.0 && budget.total_j > recool_threshold_j) {
    budget.recool_needed = true;
    budget.recool_at_step =
        static_cast<std::int64_t>(std::floor(recool_threshold_j / per_shift_energy_j)) + 1;
  }
  return budget;
}

std::string report_to_json(const ExecutionReport& report) {
  nlohmann::ordered_json doc;
  doc["ok"] = report.ok;
  doc["shift_cost"] = report.shift_cost;
  doc["flip_cost"] = report.flip_cost;
  if (!report.ok) {
    doc["failed_step"] = report.failed_step;
    doc["error"] = report.error;
  }
  doc["is_compacted"] = is_compacted(report.final_grid);
  doc["final_grid"] = nlohmann::ordered_json::parse(grid_to_json(report.final_grid));
  return doc.dump(2);
}

std::string trace_to_csv(const std::vector<StepTraceRow>& trace) {
  std::ostringstream out;
  out << "step,axis,direction,mobile\n";
  for (const auto& row : trace)
    out << row.step << ',' << axis_name(row.axis) << ',' << row.direction << ','
        << row.mobile_count << '\n';
  return out.str();
}

}  // namespace latcomp
