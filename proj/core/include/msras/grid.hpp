#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "msras/sparse.hpp"

namespace msras {

enum class BoundaryTag { Dirichlet, Outflow };
enum class Side { Left, Right, Bottom, Top };

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

/// Tag rule for the four sides of the rectangle, with an optional per-face
/// override (side, running index along that side).
struct BoundarySpec {
  BoundaryTag left = BoundaryTag::Dirichlet;
  BoundaryTag right = BoundaryTag::Dirichlet;
  BoundaryTag bottom = BoundaryTag::Dirichlet;
  BoundaryTag top = BoundaryTag::Dirichlet;
  std::function<std::optional<BoundaryTag>(Side, int)> override_face;

  static BoundarySpec all_dirichlet() { return {}; }
  BoundaryTag side_tag(Side s) const;
};

struct InteriorFace {
  index_t minus_cell = 0;  // lower cell index
  index_t plus_cell = 0;
  Vec2 normal;  // unit, oriented minus -> plus
  Vec2 center;
  double measure = 0.0;
};

struct BoundaryFace {
  index_t cell = 0;
  BoundaryTag tag = BoundaryTag::Dirichlet;
  Side side = Side::Left;
  Vec2 normal;  // outward unit normal
  Vec2 center;
  double measure = 0.0;
};

/// Undirected cell-adjacency graph (cells adjacent iff they share a face),
/// stored as CSR offsets + sorted neighbor lists.
struct DofGraph {
  std::vector<index_t> offsets{0};
  std::vector<index_t> neighbors;

  index_t size() const { return static_cast<index_t>(offsets.size()) - 1; }
  std::span<const index_t> adjacent(index_t cell) const {
    return {neighbors.data() + offsets[cell], static_cast<std::size_t>(offsets[cell + 1] - offsets[cell])};
  }
  index_t degree(index_t cell) const { return offsets[cell + 1] - offsets[cell]; }
  index_t edge_count() const { return static_cast<index_t>(neighbors.size()) / 2; }
};

/// Structured 2D Cartesian cell mesh. Cell index = iy*nx + ix (row-major).
/// Immutable after construction; safe for concurrent reads.
class Grid {
public:
  Grid(index_t nx, index_t ny, std::array<double, 4> extents, const BoundarySpec& boundary);

  index_t nx() const { return nx_; }
  index_t ny() const { return ny_; }
  index_t cell_count() const { return nx_ * ny_; }
  double x0() const { return x0_; }
  double x1() const { return x1_; }
  double y0() const { return y0_; }
  double y1() const { return y1_; }
  double hx() const { return hx_; }
  double hy() const { return hy_; }
  double cell_volume() const { return hx_ * hy_; }

  index_t cell_index(index_t ix, index_t iy) const { return iy * nx_ + ix; }
  index_t cell_ix(index_t cell) const { return cell % nx_; }
  index_t cell_iy(index_t cell) const { return cell / nx_; }
  Vec2 cell_center(index_t cell) const {
    return {x0_ + (static_cast<double>(cell_ix(cell)) + 0.5) * hx_, y0_ + (static_cast<double>(cell_iy(cell)) + 0.5) * hy_};
  }
  /// Lower-left corner of a cell.
  Vec2 cell_origin(index_t cell) const {
    return {x0_ + static_cast<double>(cell_ix(cell)) * hx_, y0_ + static_cast<double>(cell_iy(cell)) * hy_};
  }

  std::span<const InteriorFace> interior_faces() const { return interior_; }
  std::span<const BoundaryFace> boundary_faces() const { return boundary_; }

  /// Face-neighbor cells (up to 4), deterministic order: left, right, down, up.
  std::vector<index_t> neighbors(index_t cell) const;

private:
  index_t nx_, ny_;
  double x0_, x1_, y0_, y1_;
  double hx_, hy_;
  std::vector<InteriorFace> interior_;
  std::vector<BoundaryFace> boundary_;
};

Grid build_grid(index_t nx, index_t ny, std::array<double, 4> extents, const BoundarySpec& boundary);

DofGraph cell_adjacency(const Grid& grid);

}  // namespace msras
