#pragma once

#include <cstdint>

#include "latcomp/lattice.hpp"
#include "latcomp/schedule.hpp"

namespace latcomp {

/// Left-justify a 1-D lattice. Repeatedly shifts every atom right of the
/// leftmost interior vacancy one site left, so the shift cost equals the
/// number of vacancies that have at least one atom to their right.
Schedule compact_1d(const OccupancyGrid& grid);

/// Recursive halving until all row atom counts agree within one. Transfers
/// cross each halving boundary as chain-pushed column moves; nodes of equal
/// depth share steps, up moves first, then down moves.
Schedule balance_2d(const OccupancyGrid& grid);

/// 3-D balancing; halving alternates between the y and z axes by recursion
/// depth until every x-row holds the same atom count within one.
Schedule balance_3d(const OccupancyGrid& grid);

/// Left-justify every x-row, all rows advancing in shared steps. Cost is the
/// maximum single-row compaction cost.
Schedule row_compact(const OccupancyGrid& grid);

/// Balance (2-D/3-D), then row-compact. 1-D inputs dispatch to compact_1d.
Schedule plan(const OccupancyGrid& grid);

/// Streaming variants: steps go to the sink, stats come back.
PlanStats compact_1d_into(const OccupancyGrid& grid, StepSink& sink);
PlanStats row_compact_into(const OccupancyGrid& grid, StepSink& sink);
PlanStats balance_into(const OccupancyGrid& grid, StepSink& sink);
PlanStats plan_into(const OccupancyGrid& grid, StepSink& sink);

/// Worst-case shift counts: n, ceil(5n/2), ceil(9n/2) for 1-D/2-D/3-D.
std::int64_t worst_case_bound(int dims, int n);

}  // namespace latcomp
