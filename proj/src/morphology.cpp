#include "vsr/morphology.hpp"

#include <algorithm>

#include "vsr/errors.hpp"

namespace vsr {

MorphologyGrid::MorphologyGrid(int width, int height, std::vector<char> cells)
    : width_(width), height_(height), occupied_(std::move(cells)) {
  if (width_ <= 0 || height_ <= 0 ||
      occupied_.size() != static_cast<std::size_t>(width_) * height_) {
    throw MalformedSpec("grid dimensions do not match occupancy data");
  }

  order_pos_.assign(occupied_.size(), -1);
  for (int r = 0; r < height_; ++r) {
    for (int c = 0; c < width_; ++c) {
      if (occupied_[idx(r, c)]) {
        order_pos_[idx(r, c)] = static_cast<int>(order_.size());
        order_.push_back({r, c});
      }
    }
  }
  if (order_.empty()) throw InvalidBody("body has no voxels");

  // Flood fill from the first voxel; the body must be one 4-connected
  // component (voxels are linked via shared faces only, not diagonals).
  std::vector<char> seen(occupied_.size(), 0);
  std::vector<CellIndex> stack{order_.front()};
  seen[idx(order_.front().row, order_.front().col)] = 1;
  std::size_t reached = 0;
  while (!stack.empty()) {
    const CellIndex cur = stack.back();
    stack.pop_back();
    ++reached;
    const CellIndex adj[4] = {{cur.row - 1, cur.col},
                              {cur.row, cur.col - 1},
                              {cur.row + 1, cur.col},
                              {cur.row, cur.col + 1}};
    for (const CellIndex& n : adj) {
      if (occupied(n) && !seen[idx(n.row, n.col)]) {
        seen[idx(n.row, n.col)] = 1;
        stack.push_back(n);
      }
    }
  }
  if (reached != order_.size()) {
    throw InvalidBody("body is not 4-connected (" + std::to_string(reached) +
                      " of " + std::to_string(order_.size()) +
                      " voxels reachable)");
  }
}

NeighborSet MorphologyGrid::neighbors(CellIndex cell) const {
  if (!occupied(cell)) {
    throw NotAVoxel("cell (" + std::to_string(cell.row) + "," +
                    std::to_string(cell.col) + ") is not a voxel");
  }
  NeighborSet out;
  const CellIndex up{cell.row - 1, cell.col};
  const CellIndex left{cell.row, cell.col - 1};
  const CellIndex down{cell.row + 1, cell.col};
  const CellIndex right{cell.row, cell.col + 1};
  if (occupied(up)) out.up = up;
  if (occupied(left)) out.left = left;
  if (occupied(down)) out.down = down;
  if (occupied(right)) out.right = right;
  return out;
}

MorphologyGrid parse_morphology(const std::string& spec) {
  if (spec.empty()) throw MalformedSpec("morphology spec is empty");

  std::vector<std::string> rows;
  std::string row;
  for (char ch : spec) {
    if (ch == '-') {
      rows.push_back(row);
      row.clear();
    } else if (ch == '0' || ch == '1') {
      row.push_back(ch);
    } else {
      throw MalformedSpec(std::string("invalid character '") + ch +
                          "' in morphology spec (expected 0, 1 or -)");
    }
  }
  rows.push_back(row);

  const std::size_t width = rows.front().size();
  if (width == 0) throw MalformedSpec("morphology spec has an empty row");
  for (const std::string& r : rows) {
    if (r.size() != width) {
      throw MalformedSpec("ragged rows in morphology spec: expected width " +
                          std::to_string(width) + ", got " +
                          std::to_string(r.size()));
    }
  }

  std::vector<char> occupied;
  occupied.reserve(width * rows.size());
  for (const std::string& r : rows) {
    for (char ch : r) occupied.push_back(ch == '1' ? 1 : 0);
  }
  return MorphologyGrid(static_cast<int>(width), static_cast<int>(rows.size()),
                        std::move(occupied));
}

std::string render_morphology(const MorphologyGrid& grid) {
  std::string out;
  for (int r = 0; r < grid.height(); ++r) {
    if (r > 0) out.push_back('-');
    for (int c = 0; c < grid.width(); ++c) {
      out.push_back(grid.occupied(r, c) ? '1' : '0');
    }
  }
  return out;
}

}  // namespace vsr
