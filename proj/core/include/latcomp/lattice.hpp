#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace latcomp {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Boolean site occupancy of a finite orthorhombic lattice, 1-D to 3-D.
///
/// Coordinates are 0-based. The flat cell buffer is x-fastest:
/// cell (x, y, z) lives at index (z * ny + y) * nx + x, so one x-row
/// (the compacting direction) is contiguous.
class OccupancyGrid {
 public:
  OccupancyGrid(int dims, std::array<int, 3> extents);

  static OccupancyGrid line(int nx) { return {1, {nx, 1, 1}}; }
  static OccupancyGrid plane(int nx, int ny) { return {2, {nx, ny, 1}}; }
  static OccupancyGrid box(int nx, int ny, int nz) { return {3, {nx, ny, nz}}; }

  int dims() const { return dims_; }
  int extent(int axis) const { return extents_[static_cast<std::size_t>(axis)]; }
  std::int64_t site_count() const { return static_cast<std::int64_t>(cells_.size()); }
  std::int64_t atom_count() const;
  double filling_factor() const;

  bool occupied(int x, int y = 0, int z = 0) const { return cells_[index(x, y, z)] != 0; }
  void set(int x, int y, int z, bool value) { cells_[index(x, y, z)] = value ? 1 : 0; }

  std::size_t index(int x, int y, int z) const {
    return (static_cast<std::size_t>(z) * extents_[1] + static_cast<std::size_t>(y)) *
               extents_[0] +
           static_cast<std::size_t>(x);
  }
  bool in_bounds(int x, int y, int z) const {
    return x >= 0 && x < extents_[0] && y >= 0 && y < extents_[1] && z >= 0 && z < extents_[2];
  }

  const std::vector<std::uint8_t>& cells() const { return cells_; }
  std::vector<std::uint8_t>& cells() { return cells_; }

  bool operator==(const OccupancyGrid&) const = default;

 private:
  int dims_;
  std::array<int, 3> extents_;
  std::vector<std::uint8_t> cells_;
};

/// Fill each site independently with probability p_occ. Deterministic for a
/// fixed seed, independent of platform.
OccupancyGrid random_fill(int dims, std::array<int, 3> extents, double p_occ,
                          std::uint64_t seed);

/// True iff every x-row is left-justified and all row atom counts differ
/// pairwise by at most one.
bool is_compacted(const OccupancyGrid& grid);

/// Atom count of every x-row, ordered by (z, y).
std::vector<std::int64_t> row_counts(const OccupancyGrid& grid);

/// Row/plane range over the non-x axes, 1-based inclusive on both ends to
/// match the planner's public indexing. The x extent is always full.
class SublatticeView {
 public:
  SublatticeView(const OccupancyGrid& grid, int y_lo, int y_hi);
  SublatticeView(const OccupancyGrid& grid, int y_lo, int y_hi, int z_lo, int z_hi);
  static SublatticeView whole(const OccupancyGrid& grid);

  const OccupancyGrid& grid() const { return *grid_; }
  int y_lo() const { return y_lo_; }
  int y_hi() const { return y_hi_; }
  int z_lo() const { return z_lo_; }
  int z_hi() const { return z_hi_; }

 private:
  const OccupancyGrid* grid_;
  int y_lo_, y_hi_, z_lo_, z_hi_;
};

std::int64_t count_atoms(const SublatticeView& view);

// JSON grid file format: {"dims": d, "extents": [...], "occupied": [0/1...]}.
// Round-trips bit exactly.
std::string grid_to_json(const OccupancyGrid& grid);
OccupancyGrid grid_from_json(std::string_view text);

}  // namespace latcomp
