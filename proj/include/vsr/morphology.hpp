#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace vsr {

// Cell coordinates in the body-plan grid. Row 0 is the top row.
struct CellIndex {
  int row = 0;
  int col = 0;
  bool operator==(const CellIndex&) const = default;
};

// Occupied lattice neighbors of a voxel, absent where there is no voxel.
struct NeighborSet {
  std::optional<CellIndex> up;
  std::optional<CellIndex> left;
  std::optional<CellIndex> down;
  std::optional<CellIndex> right;
};

// Body plan: which cells of a WxH lattice contain voxels. Valid grids have
// at least one voxel and form a single 4-connected component. Immutable
// after construction; safe to share across threads.
class MorphologyGrid {
public:
  MorphologyGrid(int width, int height, std::vector<char> occupied);

  int width() const { return width_; }
  int height() const { return height_; }
  int voxel_count() const { return static_cast<int>(order_.size()); }

  bool occupied(int row, int col) const {
    return in_bounds(row, col) && occupied_[idx(row, col)] != 0;
  }
  bool occupied(CellIndex c) const { return occupied(c.row, c.col); }

  // Occupied cells in row-major order (top row first, left to right).
  // This is the canonical voxel ordering for genotypes and output files.
  const std::vector<CellIndex>& voxel_order() const { return order_; }

  // Position of a cell within voxel_order(), -1 if unoccupied.
  int voxel_index(CellIndex c) const {
    return in_bounds(c.row, c.col) ? order_pos_[idx(c.row, c.col)] : -1;
  }

  NeighborSet neighbors(CellIndex cell) const;

  bool operator==(const MorphologyGrid& other) const {
    return width_ == other.width_ && height_ == other.height_ &&
           occupied_ == other.occupied_;
  }

private:
  bool in_bounds(int row, int col) const {
    return row >= 0 && row < height_ && col >= 0 && col < width_;
  }
  std::size_t idx(int row, int col) const {
    return static_cast<std::size_t>(row) * width_ + col;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<char> occupied_;       // row-major, top row first
  std::vector<CellIndex> order_;     // occupied cells, row-major
  std::vector<int> order_pos_;       // cell -> index in order_, -1 if empty
};

// Parse a body plan like "1111-1111-1001" (rows top to bottom, '-' between
// rows). Throws MalformedSpec for syntax problems, InvalidBody for an empty
// or disconnected body.
MorphologyGrid parse_morphology(const std::string& spec);

// Inverse of parse_morphology: parse_morphology(render_morphology(g)) == g.
std::string render_morphology(const MorphologyGrid& grid);

}  // namespace vsr
