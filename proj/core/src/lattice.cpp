#include "latcomp/lattice.hpp"

#include <algorithm>
#include <numeric>

#include <json.hpp>

namespace latcomp {

OccupancyGrid::OccupancyGrid(int dims, std::array<int, 3> extents)
    : dims_(dims), extents_(extents) {
  if (dims < 1 || dims > 3) throw std::invalid_argument("dims must be 1, 2 or 3");
  if (dims < 3 && extents_[2] != 1) throw std::invalid_argument("z extent must be 1 below 3-D");
  if (dims < 2 && extents_[1] != 1) throw std::invalid_argument("y extent must be 1 below 2-D");
  for (int a = 0; a < 3; ++a) {
    if (extents_[static_cast<std::size_t>(a)] < 1)
      throw std::invalid_argument("extents must be >= 1");
  }
  cells_.assign(static_cast<std::size_t>(extents_[0]) * extents_[1] * extents_[2], 0);
}

std::int64_t OccupancyGrid::atom_count() const {
  return std::accumulate(cells_.begin(), cells_.end(), std::int64_t{0});
}

double OccupancyGrid::filling_factor() const {
  return static_cast<double>(atom_count()) / static_cast<double>(site_count());
}

namespace {

// splitmix64; fixed-point threshold comparison keeps the draw exact for
// p_occ in {0, 1} and identical across platforms.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

OccupancyGrid random_fill(int dims, std::array<int, 3> extents, double p_occ,
                          std::uint64_t seed) {
  if (p_occ < 0.0 || p_occ > 1.0) throw std::invalid_argument("p_occ must lie in [0, 1]");
  OccupancyGrid grid(dims, extents);
  const auto threshold =
      static_cast<std::uint64_t>(p_occ * 9007199254740992.0);  // p * 2^53
  std::uint64_t state = seed;
  auto& cells = grid.cells();
  for (auto& cell : cells) {
    cell = ((splitmix64(state) >> 11) < threshold) ? 1 : 0;
  }
  return grid;
}

bool is_compacted(const OccupancyGrid& grid) {
  const int nx = grid.extent(0);
  std::int64_t min_count = -1, max_count = -1;
  for (int z = 0; z < grid.extent(2); ++z) {
    for (int y = 0; y < grid.extent(1); ++y) {
      std::int64_t count = 0;
      bool seen_vacancy = false;
      for (int x = 0; x < nx; ++x) {
        if (grid.occupied(x, y, z)) {
          if (seen_vacancy) return false;  // interior gap
          ++count;
        } else {
          seen_vacancy = true;
        }
      }
      if (min_count < 0) {
        min_count = max_count = count;
      } else {
        min_count = std::min(min_count, count);
        max_count = std::max(max_count, count);
      }
    }
  }
  return max_count - min_count <= 1;
}

std::vector<std::int64_t> row_counts(const OccupancyGrid& grid) {
  std::vector<std::int64_t> counts;
  counts.reserve(static_cast<std::size_t>(grid.extent(1)) * grid.extent(2));
  for (int z = 0; z < grid.extent(2); ++z) {
    for (int y = 0; y < grid.extent(1); ++y) {
      std::int64_t count = 0;
      for (int x = 0; x < grid.extent(0); ++x) count += grid.occupied(x, y, z) ? 1 : 0;
      counts.push_back(count);
    }
  }
  return counts;
}

SublatticeView::SublatticeView(const OccupancyGrid& grid, int y_lo, int y_hi)
    : SublatticeView(grid, y_lo, y_hi, 1, grid.extent(2)) {}

SublatticeView::SublatticeView(const OccupancyGrid& grid, int y_lo, int y_hi, int z_lo,
                               int z_hi)
    : grid_(&grid), y_lo_(y_lo), y_hi_(y_hi), z_lo_(z_lo), z_hi_(z_hi) {
  if (y_lo < 1 || y_lo > y_hi || y_hi > grid.extent(1))
    throw std::invalid_argument("row range out of bounds");
  if (z_lo < 1 || z_lo > z_hi || z_hi > grid.extent(2))
    throw std::invalid_argument("plane range out of bounds");
}

SublatticeView SublatticeView::whole(const OccupancyGrid& grid) {
  return {grid, 1, grid.extent(1), 1, grid.extent(2)};
}

std::int64_t count_atoms(const SublatticeView& view) {
  const auto& grid = view.grid();
  std::int64_t total = 0;
  for (int z = view.z_lo() - 1; z < view.z_hi(); ++z) {
    for (int y = view.y_lo() - 1; y < view.y_hi(); ++y) {
      for (int x = 0; x < grid.extent(0); ++x) total += grid.occupied(x, y, z) ? 1 : 0;
    }
  }
  return total;
}

std::string grid_to_json(const OccupancyGrid& grid) {
  nlohmann::ordered_json doc;
  doc["dims"] = grid.dims();
  std::vector<int> extents;
  for (int a = 0; a < grid.dims(); ++a) extents.push_back(grid.extent(a));
  doc["extents"] = extents;
  doc["occupied"] = std::vector<int>(grid.cells().begin(), grid.cells().end());
  return doc.dump();
}

OccupancyGrid grid_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("grid json: ") + e.what());
  }
  try {
    const int dims = doc.at("dims").get<int>();
    const auto ext = doc.at("extents").get<std::vector<int>>();
    if (dims < 1 || dims > 3 || static_cast<int>(ext.size()) != dims)
      throw ParseError("grid json: dims/extents mismatch");
    std::array<int, 3> extents{1, 1, 1};
    for (int a = 0; a < dims; ++a) extents[static_cast<std::size_t>(a)] = ext[static_cast<std::size_t>(a)];
    OccupancyGrid grid(dims, extents);
    const auto occ = doc.at("occupied").get<std::vector<int>>();
    if (static_cast<std::int64_t>(occ.size()) != grid.site_count())
      throw ParseError("grid json: occupancy length mismatch");
    for (std::size_t i = 0; i < occ.size(); ++i) {
      if (occ[i] != 0 && occ[i] != 1) throw ParseError("grid json: occupancy must be 0/1");
      grid.cells()[i] = static_cast<std::uint8_t>(occ[i]);
    }
    return grid;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("grid json: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("grid json: ") + e.what());
  }
}

}  // namespace latcomp
