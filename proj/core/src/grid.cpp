#include "msras/grid.hpp"

#include <algorithm>
#include <stdexcept>

namespace msras {

BoundaryTag BoundarySpec::side_tag(Side s) const {
  switch (s) {
    case Side::Left: return left;
    case Side::Right: return right;
    case Side::Bottom: return bottom;
    case Side::Top: return top;
  }
  return left;
}

Grid::Grid(index_t nx, index_t ny, std::array<double, 4> extents, const BoundarySpec& boundary)
    : nx_(nx), ny_(ny), x0_(extents[0]), x1_(extents[1]), y0_(extents[2]), y1_(extents[3]) {
  if (nx_ < 1 || ny_ < 1) throw std::invalid_argument("Grid: cell counts must be >= 1");
  if (!(x1_ > x0_) || !(y1_ > y0_)) throw std::invalid_argument("Grid: degenerate extents");
  hx_ = (x1_ - x0_) / static_cast<double>(nx_);
  hy_ = (y1_ - y0_) / static_cast<double>(ny_);

  // Fixed enumeration: all vertical interior faces in row-major cell order,
  // then all horizontal ones. Two builds of the same grid are bit-identical.
  interior_.reserve(static_cast<std::size_t>((nx_ - 1) * ny_ + nx_ * (ny_ - 1)));
  for (index_t iy = 0; iy < ny_; ++iy) {
    for (index_t ix = 0; ix + 1 < nx_; ++ix) {
      InteriorFace f;
      f.minus_cell = cell_index(ix, iy);
      f.plus_cell = cell_index(ix + 1, iy);
      f.normal = {1.0, 0.0};
      f.center = {x0_ + static_cast<double>(ix + 1) * hx_, y0_ + (static_cast<double>(iy) + 0.5) * hy_};
      f.measure = hy_;
      interior_.push_back(f);
    }
  }
  for (index_t iy = 0; iy + 1 < ny_; ++iy) {
    for (index_t ix = 0; ix < nx_; ++ix) {
      InteriorFace f;
      f.minus_cell = cell_index(ix, iy);
      f.plus_cell = cell_index(ix, iy + 1);
      f.normal = {0.0, 1.0};
      f.center = {x0_ + (static_cast<double>(ix) + 0.5) * hx_, y0_ + static_cast<double>(iy + 1) * hy_};
      f.measure = hx_;
      interior_.push_back(f);
    }
  }

  auto tag_of = [&boundary](Side s, index_t i) {
    if (boundary.override_face) {
      if (auto t = boundary.override_face(s, static_cast<int>(i))) return *t;
    }
    return boundary.side_tag(s);
  };

  boundary_.reserve(static_cast<std::size_t>(2 * (nx_ + ny_)));
  for (index_t iy = 0; iy < ny_; ++iy) {  // left
    BoundaryFace f;
    f.cell = cell_index(0, iy);
    f.side = Side::Left;
    f.tag = tag_of(Side::Left, iy);
    f.normal = {-1.0, 0.0};
    f.center = {x0_, y0_ + (static_cast<double>(iy) + 0.5) * hy_};
    f.measure = hy_;
    boundary_.push_back(f);
  }
  for (index_t iy = 0; iy < ny_; ++iy) {  // right
    BoundaryFace f;
    f.cell = cell_index(nx_ - 1, iy);
    f.side = Side::Right;
    f.tag = tag_of(Side::Right, iy);
    f.normal = {1.0, 0.0};
    f.center = {x1_, y0_ + (static_cast<double>(iy) + 0.5) * hy_};
    f.measure = hy_;
    boundary_.push_back(f);
  }
  for (index_t ix = 0; ix < nx_; ++ix) {  // bottom
    BoundaryFace f;
    f.cell = cell_index(ix, 0);
    f.side = Side::Bottom;
    f.tag = tag_of(Side::Bottom, ix);
    f.normal = {0.0, -1.0};
    f.center = {x0_ + (static_cast<double>(ix) + 0.5) * hx_, y0_};
    f.measure = hx_;
    boundary_.push_back(f);
  }
  for (index_t ix = 0; ix < nx_; ++ix) {  // top
    BoundaryFace f;
    f.cell = cell_index(ix, ny_ - 1);
    f.side = Side::Top;
    f.tag = tag_of(Side::Top, ix);
    f.normal = {0.0, 1.0};
    f.center = {x0_ + (static_cast<double>(ix) + 0.5) * hx_, y1_};
    f.measure = hx_;
    boundary_.push_back(f);
  }
}

std::vector<index_t> Grid::neighbors(index_t cell) const {
  const index_t ix = cell_ix(cell), iy = cell_iy(cell);
  std::vector<index_t> out;
  out.reserve(4);
  if (ix > 0) out.push_back(cell_index(ix - 1, iy));
  if (ix + 1 < nx_) out.push_back(cell_index(ix + 1, iy));
  if (iy > 0) out.push_back(cell_index(ix, iy - 1));
  if (iy + 1 < ny_) out.push_back(cell_index(ix, iy + 1));
  return out;
}

Grid build_grid(index_t nx, index_t ny, std::array<double, 4> extents, const BoundarySpec& boundary) {
  return Grid(nx, ny, extents, boundary);
}

DofGraph cell_adjacency(const Grid& grid) {
  const index_t n = grid.cell_count();
  DofGraph g;
  g.offsets.assign(static_cast<std::size_t>(n) + 1, 0);
  for (const InteriorFace& f : grid.interior_faces()) {
    ++g.offsets[f.minus_cell + 1];
    ++g.offsets[f.plus_cell + 1];
  }
  for (index_t c = 0; c < n; ++c) g.offsets[c + 1] += g.offsets[c];
  g.neighbors.resize(static_cast<std::size_t>(g.offsets[n]));
  std::vector<index_t> next(g.offsets.begin(), g.offsets.end() - 1);
  for (const InteriorFace& f : grid.interior_faces()) {
    g.neighbors[next[f.minus_cell]++] = f.plus_cell;
    g.neighbors[next[f.plus_cell]++] = f.minus_cell;
  }
  for (index_t c = 0; c < n; ++c)
    std::sort(g.neighbors.begin() + g.offsets[c], g.neighbors.begin() + g.offsets[c + 1]);
  return g;
}

}  // namespace msras
