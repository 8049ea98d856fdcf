#include "msras/assembly.hpp"

#include <cmath>
#include <stdexcept>

namespace msras {

SparseMatrix dg_local_aform(const DiscreteSystem& sys, std::span<const index_t> cells);
SparseMatrix ccfv_local_aform(const DiscreteSystem& sys, std::span<const index_t> cells);

SparseMatrix DiscreteSystem::local_aform(std::span<const index_t> cells) const {
  return backend == Discretization::DG ? dg_local_aform(*this, cells) : ccfv_local_aform(*this, cells);
}

Vec2 DiscreteSystem::dof_position(index_t dof) const {
  const index_t cell = dof / dofs_per_cell;
  if (backend == Discretization::CCFV) return grid->cell_center(cell);
  const int loc = static_cast<int>(dof % 4);
  const Vec2 o = grid->cell_origin(cell);
  return {o.x + (loc % 2 ? grid->hx() : 0.0), o.y + (loc / 2 ? grid->hy() : 0.0)};
}

namespace {

index_t locate_cell(const Grid& grid, const Vec2& p) {
  const double tol = 1e-12 * std::max(grid.x1() - grid.x0(), grid.y1() - grid.y0());
  if (p.x < grid.x0() - tol || p.x > grid.x1() + tol || p.y < grid.y0() - tol || p.y > grid.y1() + tol)
    throw std::invalid_argument("evaluate_solution: point outside the domain");
  auto clamp = [](index_t v, index_t hi) { return std::max<index_t>(0, std::min(v, hi)); };
  const index_t ix = clamp(static_cast<index_t>(std::floor((p.x - grid.x0()) / grid.hx())), grid.nx() - 1);
  const index_t iy = clamp(static_cast<index_t>(std::floor((p.y - grid.y0()) / grid.hy())), grid.ny() - 1);
  return grid.cell_index(ix, iy);
}

double eval_in_cell(const DiscreteSystem& sys, std::span<const double> u, index_t cell, const Vec2& p) {
  if (sys.backend == Discretization::CCFV) return u[cell];
  const Vec2 o = sys.grid->cell_origin(cell);
  const double xi = (p.x - o.x) / sys.grid->hx();
  const double eta = (p.y - o.y) / sys.grid->hy();
  const double n0 = (1 - xi) * (1 - eta), n1 = xi * (1 - eta), n2 = (1 - xi) * eta, n3 = xi * eta;
  return u[4 * cell] * n0 + u[4 * cell + 1] * n1 + u[4 * cell + 2] * n2 + u[4 * cell + 3] * n3;
}

}  // namespace

std::vector<double> evaluate_solution(const DiscreteSystem& sys, std::span<const double> u, std::span<const Vec2> points) {
  if (static_cast<index_t>(u.size()) != sys.n_dofs())
    throw std::invalid_argument("evaluate_solution: coefficient vector length mismatch");
  std::vector<double> vals;
  vals.reserve(points.size());
  for (const Vec2& p : points) vals.push_back(eval_in_cell(sys, u, locate_cell(*sys.grid, p), p));
  return vals;
}

double l2_error(const DiscreteSystem& sys, std::span<const double> u, const ScalarField& exact) {
  // 3-point Gauss per axis.
  const double offs[3] = {0.5 - 0.5 * std::sqrt(0.6), 0.5, 0.5 + 0.5 * std::sqrt(0.6)};
  const double wts[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  const Grid& g = *sys.grid;
  double acc = 0.0;
  for (index_t cell = 0; cell < g.cell_count(); ++cell) {
    const Vec2 o = g.cell_origin(cell);
    for (int qx = 0; qx < 3; ++qx) {
      for (int qy = 0; qy < 3; ++qy) {
        const Vec2 p{o.x + offs[qx] * g.hx(), o.y + offs[qy] * g.hy()};
        const double diff = eval_in_cell(sys, u, cell, p) - exact(p.x, p.y);
        acc += wts[qx] * wts[qy] * g.cell_volume() * diff * diff;
      }
    }
  }
  return std::sqrt(acc);
}

std::vector<double> interpolate(const DiscreteSystem& sys, const ScalarField& f) {
  std::vector<double> u(static_cast<std::size_t>(sys.n_dofs()));
  for (index_t dof = 0; dof < sys.n_dofs(); ++dof) {
    const Vec2 p = sys.dof_position(dof);
    u[static_cast<std::size_t>(dof)] = f(p.x, p.y);
  }
  return u;
}

}  // namespace msras
