#include "latcomp/schedule.hpp"

#include <json.hpp>

#include "latcomp/lattice.hpp"

namespace latcomp {

char axis_name(Axis axis) {
  switch (axis) {
    case Axis::X: return 'x';
    case Axis::Y: return 'y';
    case Axis::Z: return 'z';
  }
  return '?';
}

Axis axis_from_name(char name) {
  switch (name) {
    case 'x': return Axis::X;
    case 'y': return Axis::Y;
    case 'z': return Axis::Z;
    default: throw ParseError("unknown axis name");
  }
}

std::int64_t Schedule::flip_cost() const {
  std::int64_t moved = 0;
  for (const auto& step : steps) moved += static_cast<std::int64_t>(step.mobile.size());
  return 2 * moved;
}

std::string schedule_to_json(const Schedule& schedule) {
  nlohmann::ordered_json doc;
  auto& steps = doc["steps"];
  steps = nlohmann::ordered_json::array();
  for (const auto& step : schedule.steps) {
    nlohmann::ordered_json item;
    item["axis"] = std::string(1, axis_name(step.axis));
    item["direction"] = step.direction;
    auto& mob = item["mobile"];
    mob = nlohmann::ordered_json::array();
    for (const auto& site : step.mobile) mob.push_back({site.x, site.y, site.z});
    steps.push_back(std::move(item));
  }
  nlohmann::ordered_json summary;
  summary["shift_cost"] = schedule.shift_cost();
  summary["flip_cost"] = schedule.flip_cost();
  summary["balance_steps"] = schedule.stats.balance_steps;
  summary["row_compact_steps"] = schedule.stats.row_compact_steps;
  summary["tree_depth"] = schedule.stats.tree_depth;
  summary["fallback_events"] = schedule.stats.fallback_events;
  summary["levels_over_bound"] = schedule.stats.levels_over_bound;
  summary["balance_failed"] = schedule.stats.balance_failed;
  if (!schedule.stats.tree.empty()) {
    auto& tree = summary["balance_tree"];
    tree = nlohmann::ordered_json::array();
    for (const auto& node : schedule.stats.tree) {
      nlohmann::ordered_json n;
      n["depth"] = node.depth;
      n["axis"] = std::string(1, axis_name(node.split_axis));
      n["rows"] = {node.y_lo, node.y_hi};
      n["planes"] = {node.z_lo, node.z_hi};
      n["transfer"] = node.transfer;
      tree.push_back(std::move(n));
    }
  }
  doc["summary"] = std::move(summary);
  return doc.dump(2);
}

Schedule schedule_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("schedule json: ") + e.what());
  }
  Schedule schedule;
  try {
    for (const auto& item : doc.at("steps")) {
      CompactionStep step;
      const auto axis = item.at("axis").get<std::string>();
      if (axis.size() != 1) throw ParseError("schedule json: bad axis");
      step.axis = axis_from_name(axis[0]);
      step.direction = item.at("direction").get<int>();
      if (step.direction != 1 && step.direction != -1)
        throw ParseError("schedule json: direction must be +1/-1");
      for (const auto& coords : item.at("mobile")) {
        const auto xyz = coords.get<std::vector<int>>();
        if (xyz.size() != 3) throw ParseError("schedule json: mobile sites are [x,y,z]");
        step.mobile.push_back({xyz[0], xyz[1], xyz[2]});
      }
      schedule.steps.push_back(std::move(step));
    }
    if (doc.contains("summary")) {
      const auto& summary = doc["summary"];
      schedule.stats.balance_steps = summary.value("balance_steps", std::int64_t{0});
      schedule.stats.row_compact_steps = summary.value("row_compact_steps", std::int64_t{0});
      schedule.stats.tree_depth = summary.value("tree_depth", 0);
      schedule.stats.fallback_events = summary.value("fallback_events", 0);
      schedule.stats.levels_over_bound = summary.value("levels_over_bound", 0);
      schedule.stats.balance_failed = summary.value("balance_failed", false);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("schedule json: ") + e.what());
  }
  return schedule;
}

}  // namespace latcomp
