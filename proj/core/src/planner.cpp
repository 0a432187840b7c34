#include "latcomp/planner.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <optional>
#include <vector>

namespace latcomp {

namespace {

// ---------------------------------------------------------------------------
// Row compaction. Every row keeps the invariant that atoms[0..front) already
// sit at positions 0..front-1; the leftmost relevant vacancy is then position
// `front`, and one shift moves every atom at an index >= front one site left.
// ---------------------------------------------------------------------------

struct RowCompactor {
  int y = 0;
  int z = 0;
  std::vector<int> atoms;  // ascending x positions
  std::size_t front = 0;

  void settle() {
    while (front < atoms.size() && atoms[front] == static_cast<int>(front)) ++front;
  }
  bool active() const { return front < atoms.size(); }

  // Appends this row's mobile sites (pre-shift positions) and advances.
  void emit_and_shift(std::vector<Site>& mobile) {
    for (std::size_t i = front; i < atoms.size(); ++i) {
      mobile.push_back({atoms[i], y, z});
      atoms[i] -= 1;
    }
    settle();
  }
};

std::vector<RowCompactor> make_rows(const OccupancyGrid& grid) {
  std::vector<RowCompactor> rows;
  rows.reserve(static_cast<std::size_t>(grid.extent(1)) * grid.extent(2));
  for (int z = 0; z < grid.extent(2); ++z) {
    for (int y = 0; y < grid.extent(1); ++y) {
      RowCompactor row{.y = y, .z = z};
      for (int x = 0; x < grid.extent(0); ++x)
        if (grid.occupied(x, y, z)) row.atoms.push_back(x);
      row.settle();
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::int64_t run_row_compaction(std::vector<RowCompactor> rows, StepSink& sink) {
  std::int64_t steps = 0;
  CompactionStep step{.axis = Axis::X, .direction = -1, .mobile = {}};
  while (true) {
    step.mobile.clear();
    for (auto& row : rows)
      if (row.active()) row.emit_and_shift(step.mobile);
    if (step.mobile.empty()) break;
    sink.on_step(step);
    ++steps;
  }
  return steps;
}

// ---------------------------------------------------------------------------
// Balancing.
// ---------------------------------------------------------------------------

struct Range {
  int lo = 0, hi = 0;  // 0-based inclusive
  int size() const { return hi - lo + 1; }
};

struct BalanceNode {
  int depth = 0;
  Range y, z;
};

// Working occupancy owned by the planner. Moves are applied with the
// planner's own bookkeeping; the executor re-validates every emitted step
// through an independent code path.
struct BalanceWork {
  OccupancyGrid grid;
  PlanStats* stats;
  StepSink* sink;
  std::int64_t steps_emitted = 0;

  bool occ(int x, int y, int z) const { return grid.occupied(x, y, z); }

  void emit(CompactionStep& step) {
    const int dx = step.axis == Axis::X ? step.direction : 0;
    const int dy = step.axis == Axis::Y ? step.direction : 0;
    const int dz = step.axis == Axis::Z ? step.direction : 0;
    for (const auto& s : step.mobile) grid.set(s.x, s.y, s.z, false);
    for (const auto& s : step.mobile) grid.set(s.x + dx, s.y + dy, s.z + dz, true);
    sink->on_step(step);
    ++steps_emitted;
  }

  std::int64_t count(Range y, Range z) const {
    std::int64_t total = 0;
    for (int zz = z.lo; zz <= z.hi; ++zz)
      for (int yy = y.lo; yy <= y.hi; ++yy)
        for (int x = 0; x < grid.extent(0); ++x) total += occ(x, yy, zz) ? 1 : 0;
    return total;
  }
};

// A transfer pending on one node: move `need` atoms across the boundary
// between src and dst slices of `axis` (all other coordinates restricted to
// the node's ranges).
struct Transfer {
  Axis axis = Axis::Y;
  int dir = +1;          // +1: src is the low half
  Range src, dst;        // slice ranges along `axis`
  Range other;           // the remaining non-x axis range
  std::int64_t need = 0;
  bool failed = false;
};

int coord(Axis axis, const Site& s) {
  return axis == Axis::Y ? s.y : (axis == Axis::Z ? s.z : s.x);
}

Site make_site(Axis axis, int along, int other_val, Axis other_axis, int x) {
  Site s{.x = x, .y = 0, .z = 0};
  (axis == Axis::Y ? s.y : s.z) = along;
  if (other_axis == Axis::Y)
    s.y = other_val;
  else if (other_axis == Axis::Z)
    s.z = other_val;
  return s;
}

// Plans this transfer's contribution to one shared step. Chains are maximal
// contiguous runs along the split axis ending in the first destination-side
// vacancy; a chain whose head starts at the boundary nets one crossing.
// Columns that cannot cross yet advance their nearest atom toward the
// boundary when more crossings are needed than are ready.
struct ColumnPlan {
  std::vector<Site> sites;
  bool crossing = false;
};

class TransferPlanner {
 public:
  TransferPlanner(BalanceWork& work, Transfer& tr) : work_(work), tr_(tr) {
    other_axis_ = tr.axis == Axis::Y ? Axis::Z : Axis::Y;
  }

  // Appends chains to `step`; returns number of crossings planned.
  std::int64_t plan_step(CompactionStep& step) {
    const int nx = work_.grid.extent(0);
    std::int64_t crossings = 0;
    std::vector<ColumnPlan> advances;
    const int boundary = tr_.dir > 0 ? tr_.src.hi : tr_.src.lo;
    for (int other = tr_.other.lo; other <= tr_.other.hi && crossings < tr_.need; ++other) {
      for (int x = 0; x < nx && crossings < tr_.need; ++x) {
        auto plan = plan_column(x, other, boundary);
        if (!plan) continue;
        if (plan->crossing) {
          append(step, *plan);
          ++crossings;
        } else {
          advances.push_back(std::move(*plan));
        }
      }
    }
    // Advance only as many columns as still lack a ready crossing.
    std::int64_t wanted = tr_.need - crossings;
    for (auto& adv : advances) {
      if (wanted <= 0) break;
      append(step, adv);
      --wanted;
    }
    return crossings;
  }

  // One lateral reroute chain (along x) for a stuck transfer, or nullopt when
  // the instance is genuinely unroutable. Chooses the source atom nearest the
  // boundary and pushes it toward the nearest column holding destination-side
  // space.
  std::optional<CompactionStep> plan_lateral() {
    const int nx = work_.grid.extent(0);
    const int boundary = tr_.dir > 0 ? tr_.src.hi : tr_.src.lo;
    // Columns with room on the destination side.
    std::vector<std::pair<int, int>> targets;  // (x, other)
    for (int other = tr_.other.lo; other <= tr_.other.hi; ++other)
      for (int x = 0; x < nx; ++x)
        if (first_dst_vacancy(x, other) >= 0) targets.emplace_back(x, other);
    if (targets.empty()) return std::nullopt;

    std::optional<CompactionStep> best;
    int best_cost = -1;
    for (int other = tr_.other.lo; other <= tr_.other.hi; ++other) {
      for (int x = 0; x < nx; ++x) {
        const int y = nearest_src_atom(x, other, boundary);
        if (y < 0) continue;
        for (const auto& [tx, tother] : targets) {
          if (tother != other) continue;  // cross-plane reroутes handled by z moves below
          if (tx == x) continue;
          const int sgn = tx > x ? +1 : -1;
          auto chain = x_chain(x, y, other, sgn);
          if (!chain) continue;
          const int cost = std::abs(tx - x);
          if (best_cost < 0 || cost < best_cost) {
            best_cost = cost;
            best = std::move(chain);
          }
        }
      }
    }
    if (best) return best;
    // Same-plane rerouting impossible; in 3-D try moving a source atom across
    // the other non-split axis toward a plane that has destination space.
    if (tr_.other.size() > 1) {
      for (int other = tr_.other.lo; other <= tr_.other.hi; ++other) {
        for (int x = 0; x < nx; ++x) {
          const int y = nearest_src_atom(x, other, boundary);
          if (y < 0) continue;
          for (const auto& [tx, tother] : targets) {
            if (tother == other) continue;
            const int sgn = tother > other ? +1 : -1;
            auto chain = other_axis_chain(x, y, other, sgn);
            if (chain) return chain;
          }
        }
      }
    }
    return std::nullopt;
  }

 private:
  // Nearest source-side atom to the boundary in this column, or -1.
  int nearest_src_atom(int x, int other, int boundary) const {
    for (int a = boundary; tr_.src.lo <= a && a <= tr_.src.hi; a -= tr_.dir)
      if (occ_at(x, a, other)) return a;
    return -1;
  }
  // First destination-side vacancy moving away from the boundary, or -1.
  int first_dst_vacancy(int x, int other) const {
    for (int a = tr_.dir > 0 ? tr_.dst.lo : tr_.dst.hi; tr_.dst.lo <= a && a <= tr_.dst.hi;
         a += tr_.dir)
      if (!occ_at(x, a, other)) return a;
    return -1;
  }

  std::optional<ColumnPlan> plan_column(int x, int other, int boundary) {
    const int head = nearest_src_atom(x, other, boundary);
    if (head < 0) return std::nullopt;
    ColumnPlan plan;
    if (head == boundary) {
      const int vac = first_dst_vacancy(x, other);
      if (vac < 0) return std::nullopt;  // blocked: destination side full
      plan.crossing = true;
      for (int a = head; a != vac; a += tr_.dir) plan.sites.push_back(site(x, a, other));
    } else {
      plan.crossing = false;
      plan.sites.push_back(site(x, head, other));
    }
    // Maximal chain: contiguous atoms behind the head move along for free.
    for (int a = head - tr_.dir; tr_.src.lo <= a && a <= tr_.src.hi && occ_at(x, a, other);
         a -= tr_.dir)
      plan.sites.push_back(site(x, a, other));
    return plan;
  }

  std::optional<CompactionStep> x_chain(int x, int along, int other, int sgn) const {
    const int nx = work_.grid.extent(0);
    int vac = -1;
    for (int xx = x + sgn; xx >= 0 && xx < nx; xx += sgn)
      if (!occ_at(xx, along, other)) {
        vac = xx;
        break;
      }
    if (vac < 0) return std::nullopt;
    CompactionStep step{.axis = Axis::X, .direction = sgn, .mobile = {}};
    for (int xx = x; xx != vac; xx += sgn) step.mobile.push_back(site(xx, along, other));
    return step;
  }

  std::optional<CompactionStep> other_axis_chain(int x, int along, int other, int sgn) const {
    int vac = -1;
    for (int oo = other + sgn; tr_.other.lo <= oo && oo <= tr_.other.hi; oo += sgn)
      if (!occ_at(x, along, oo)) {
        vac = oo;
        break;
      }
    if (vac < 0) return std::nullopt;
    CompactionStep step{.axis = other_axis_, .direction = sgn, .mobile = {}};
    for (int oo = other; oo != vac; oo += sgn) step.mobile.push_back(site(x, along, oo));
    return step;
  }

  bool occ_at(int x, int along, int other) const {
    const Site s = site(x, along, other);
    return work_.occ(s.x, s.y, s.z);
  }
  Site site(int x, int along, int other) const {
    return make_site(tr_.axis, along, other, other_axis_, x);
  }

  void append(CompactionStep& step, const ColumnPlan& plan) {
    step.mobile.insert(step.mobile.end(), plan.sites.begin(), plan.sites.end());
  }

  BalanceWork& work_;
  Transfer& tr_;
  Axis other_axis_ = Axis::Z;
};

// Target band for the low half of a split: any value keeps the recursion able
// to finish with all row counts within one of each other; the planner clamps
// the current count into the band so already-near-balanced halves move
// nothing.
struct TargetBand {
  std::int64_t lo = 0, hi = 0;
};

TargetBand target_band(std::int64_t total, std::int64_t rows_low, std::int64_t rows_high) {
  const std::int64_t rows = rows_low + rows_high;
  const std::int64_t n_min = total / rows;
  const std::int64_t rem = total % rows;
  return {rows_low * n_min + std::max<std::int64_t>(0, rem - rows_high),
          rows_low * n_min + std::min(rem, rows_low)};
}

class Balancer {
 public:
  Balancer(const OccupancyGrid& grid, StepSink& sink, PlanStats& stats)
      : work_{.grid = grid, .stats = &stats, .sink = &sink}, stats_(stats) {}

  void run() {
    std::vector<BalanceNode> level;
    level.push_back({0,
                     {0, work_.grid.extent(1) - 1},
                     {0, work_.grid.extent(2) - 1}});
    while (!level.empty()) {
      level = process_level(std::move(level));
    }
  }

  std::int64_t steps() const { return work_.steps_emitted; }

 private:
  static int ceil_log2(int n) {
    int d = 0;
    while ((1 << d) < n) ++d;
    return d;
  }

  std::vector<BalanceNode> process_level(std::vector<BalanceNode> nodes) {
    const bool three_d = work_.grid.dims() == 3;
    std::vector<BalanceNode> next;
    std::vector<Transfer> transfers;
    int k_max = 0;

    for (const auto& node : nodes) {
      stats_.tree_depth = std::max(stats_.tree_depth, node.depth);
      const bool y_single = node.y.size() == 1;
      const bool z_single = node.z.size() == 1;
      if (y_single && z_single) {
        record(node, Axis::Y, 0);  // leaf
        continue;
      }
      Axis axis;
      if (!three_d) {
        axis = Axis::Y;
      } else {
        const Axis preferred = (node.depth % 2 == 0) ? Axis::Y : Axis::Z;
        const bool preferred_single = (preferred == Axis::Y) ? y_single : z_single;
        if (preferred_single) {
          // Degenerate along the preferred axis: re-enter one level down so
          // the alternation bookkeeping stays aligned.
          next.push_back({node.depth + 1, node.y, node.z});
          continue;
        }
        axis = preferred;
      }

      const Range split = axis == Axis::Y ? node.y : node.z;
      const Range other = axis == Axis::Y ? node.z : node.y;
      const int mid = (split.lo + split.hi) / 2;  // low half keeps ceil(l/2) slices
      const Range low{split.lo, mid}, high{mid + 1, split.hi};
      k_max = std::max(k_max, split.size());

      const std::int64_t n_low = work_.count(axis == Axis::Y ? low : node.y,
                                             axis == Axis::Y ? node.z : low);
      const std::int64_t n_high = work_.count(axis == Axis::Y ? high : node.y,
                                              axis == Axis::Y ? node.z : high);
      const std::int64_t rows_low = static_cast<std::int64_t>(low.size()) * other.size();
      const std::int64_t rows_high = static_cast<std::int64_t>(high.size()) * other.size();
      const auto band = target_band(n_low + n_high, rows_low, rows_high);

      Transfer tr{.axis = axis, .dir = +1, .src = low, .dst = high, .other = other, .need = 0};
      if (n_low > band.hi) {
        tr.need = n_low - band.hi;
      } else if (n_low < band.lo) {
        tr.dir = -1;
        tr.src = high;
        tr.dst = low;
        tr.need = band.lo - n_low;
      }
      record(node, axis, tr.dir > 0 ? tr.need : -tr.need);
      if (tr.need > 0) transfers.push_back(tr);

      BalanceNode low_child{node.depth + 1, node.y, node.z};
      BalanceNode high_child{node.depth + 1, node.y, node.z};
      (axis == Axis::Y ? low_child.y : low_child.z) = low;
      (axis == Axis::Y ? high_child.y : high_child.z) = high;
      next.push_back(low_child);
      next.push_back(high_child);
    }

    emit_level(transfers, k_max);
    return next;
  }

  void emit_level(std::vector<Transfer>& transfers, int k_max) {
    if (transfers.empty()) return;
    const std::int64_t budget = (k_max + 1) / 2;
    bool over = false;
    for (int dir : {-1, +1}) {
      std::int64_t steps_used = 0;
      while (true) {
        CompactionStep step;
        std::int64_t planned = 0;
        for (auto& tr : transfers) {
          if (tr.dir != dir || tr.need <= 0 || tr.failed) continue;
          if (step.mobile.empty()) {
            step.axis = tr.axis;
            step.direction = tr.dir;
          }
          if (step.axis != tr.axis) continue;  // mixed axes resolve on later passes
          TransferPlanner planner(work_, tr);
          const auto before = step.mobile.size();
          const std::int64_t crossings = planner.plan_step(step);
          if (step.mobile.size() > before || crossings > 0) ++planned;
          tr.need -= crossings;
        }
        if (!step.mobile.empty()) {
          work_.emit(step);
          ++steps_used;
        }
        bool pending = false;
        for (const auto& tr : transfers)
          pending |= (tr.dir == dir && tr.need > 0 && !tr.failed);
        if (!pending) break;
        if (planned == 0 || step.mobile.empty()) {
          if (!run_fallback(transfers, dir)) break;
          ++steps_used;
        }
      }
      if (steps_used > budget) over = true;
    }
    if (over) ++stats_.levels_over_bound;
  }

  // Reroute one stuck transfer laterally. Returns false when nothing can
  // move, in which case the affected transfers are flagged as failed.
  bool run_fallback(std::vector<Transfer>& transfers, int dir) {
    for (auto& tr : transfers) {
      if (tr.dir != dir || tr.need <= 0 || tr.failed) continue;
      TransferPlanner planner(work_, tr);
      if (auto lateral = planner.plan_lateral()) {
        work_.emit(*lateral);
        ++stats_.fallback_events;
        return true;
      }
      tr.failed = true;
      stats_.balance_failed = true;
    }
    return false;
  }

  void record(const BalanceNode& node, Axis axis, std::int64_t transfer) {
    stats_.tree.push_back({node.depth, axis, node.y.lo + 1, node.y.hi + 1, node.z.lo + 1,
                           node.z.hi + 1, transfer});
  }

  BalanceWork work_;
  PlanStats& stats_;
};

}  // namespace

PlanStats compact_1d_into(const OccupancyGrid& grid, StepSink& sink) {
  if (grid.dims() != 1) throw std::invalid_argument("compact_1d expects a 1-D grid");
  PlanStats stats;
  stats.row_compact_steps = run_row_compaction(make_rows(grid), sink);
  return stats;
}

PlanStats row_compact_into(const OccupancyGrid& grid, StepSink& sink) {
  PlanStats stats;
  stats.row_compact_steps = run_row_compaction(make_rows(grid), sink);
  return stats;
}

PlanStats balance_into(const OccupancyGrid& grid, StepSink& sink) {
  if (grid.dims() < 2) throw std::invalid_argument("balance expects a 2-D or 3-D grid");
  PlanStats stats;
  Balancer balancer(grid, sink, stats);
  balancer.run();
  stats.balance_steps = balancer.steps();
  return stats;
}

namespace {

// Applies planner steps to a shadow grid so the row phase can start from the
// balanced occupancy, forwarding everything to the caller's sink.
class ShadowSink : public StepSink {
 public:
  ShadowSink(OccupancyGrid grid, StepSink& downstream)
      : grid_(std::move(grid)), downstream_(downstream) {}
  void on_step(const CompactionStep& step) override {
    const int dx = step.axis == Axis::X ? step.direction : 0;
    const int dy = step.axis == Axis::Y ? step.direction : 0;
    const int dz = step.axis == Axis::Z ? step.direction : 0;
    for (const auto& s : step.mobile) grid_.set(s.x, s.y, s.z, false);
    for (const auto& s : step.mobile) grid_.set(s.x + dx, s.y + dy, s.z + dz, true);
    downstream_.on_step(step);
  }
  const OccupancyGrid& grid() const { return grid_; }

 private:
  OccupancyGrid grid_;
  StepSink& downstream_;
};

}  // namespace

PlanStats plan_into(const OccupancyGrid& grid, StepSink& sink) {
  if (grid.dims() == 1) return compact_1d_into(grid, sink);
  ShadowSink shadow(grid, sink);
  PlanStats stats = balance_into(grid, shadow);
  stats.row_compact_steps = run_row_compaction(make_rows(shadow.grid()), sink);
  return stats;
}

namespace {

Schedule collect(const OccupancyGrid& grid, PlanStats (*fn)(const OccupancyGrid&, StepSink&)) {
  CollectSink sink;
  sink.schedule.stats = fn(grid, sink);
  return std::move(sink.schedule);
}

}  // namespace

Schedule compact_1d(const OccupancyGrid& grid) { return collect(grid, &compact_1d_into); }
Schedule row_compact(const OccupancyGrid& grid) { return collect(grid, &row_compact_into); }
Schedule balance_2d(const OccupancyGrid& grid) {
  if (grid.dims() != 2) throw std::invalid_argument("balance_2d expects a 2-D grid");
  return collect(grid, &balance_into);
}
Schedule balance_3d(const OccupancyGrid& grid) {
  if (grid.dims() != 3) throw std::invalid_argument("balance_3d expects a 3-D grid");
  return collect(grid, &balance_into);
}
Schedule plan(const OccupancyGrid& grid) { return collect(grid, &plan_into); }

std::int64_t worst_case_bound(int dims, int n) {
  if (n < 1 || dims < 1 || dims > 3) throw std::invalid_argument("worst_case_bound domain");
  const std::int64_t nn = n;
  switch (dims) {
    case 1: return nn;
    case 2: return (5 * nn + 1) / 2;
    default: return (9 * nn + 1) / 2;
  }
}

}  // namespace latcomp
