#include "msras/assembly.hpp"

#include <cmath>
#include <stdexcept>

namespace msras {

namespace {

double transmissibility(double a_minus, double a_plus, double measure, double dist) {
  // Two-point flux with distance-harmonic averaging; half the center
  // distance lies on each side of the face.
  const double ssum = a_minus + a_plus;
  if (ssum == 0.0) return 0.0;
  return 2.0 * measure * a_minus * a_plus / (dist * ssum);
}

enum class Mode { Full, AForm };

SparseMatrix assemble_ccfv_matrix(const Grid& grid, const ProblemSpec& prob, Mode mode,
                                  std::span<const index_t> cell_map, index_t n_blocks, std::vector<double>* f_out) {
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(grid.interior_faces().size()) * 4);
  if (f_out) f_out->assign(static_cast<std::size_t>(n_blocks), 0.0);
  auto diffusion = [&](index_t cell) {
    return mode == Mode::Full ? prob.diffusion_of(cell) : prob.eig_diffusion_of(cell);
  };

  for (const InteriorFace& face : grid.interior_faces()) {
    const index_t bm = cell_map[face.minus_cell];
    const index_t bp = cell_map[face.plus_cell];
    if (bm < 0 || bp < 0) continue;
    const bool vertical = face.normal.x != 0.0;
    const double dist = vertical ? grid.hx() : grid.hy();
    const double t = transmissibility(diffusion(face.minus_cell), diffusion(face.plus_cell), face.measure, dist);
    trip.push_back({bm, bm, t});
    trip.push_back({bm, bp, -t});
    trip.push_back({bp, bp, t});
    trip.push_back({bp, bm, -t});

    if (mode == Mode::Full) {
      const Vec2 b = prob.velocity(face.center.x, face.center.y);
      const double s = (b.x * face.normal.x + b.y * face.normal.y) * face.measure;
      const index_t upwind = s >= 0.0 ? bm : bp;
      trip.push_back({bm, upwind, s});
      trip.push_back({bp, upwind, -s});
    }
  }

  for (const BoundaryFace& face : grid.boundary_faces()) {
    const index_t blk = cell_map[face.cell];
    if (blk < 0) continue;
    const bool vertical = face.normal.x != 0.0;
    const double half_dist = 0.5 * (vertical ? grid.hx() : grid.hy());
    if (face.tag == BoundaryTag::Dirichlet) {
      const double a = diffusion(face.cell);
      const double t = a * face.measure / half_dist;  // ghost-value elimination
      trip.push_back({blk, blk, t});
      if (f_out) (*f_out)[blk] += t * prob.dirichlet(face.center.x, face.center.y);
      if (mode == Mode::Full) {
        const Vec2 b = prob.velocity(face.center.x, face.center.y);
        const double s = (b.x * face.normal.x + b.y * face.normal.y) * face.measure;
        if (s >= 0.0)
          trip.push_back({blk, blk, s});
        else if (f_out)
          (*f_out)[blk] += -s * prob.dirichlet(face.center.x, face.center.y);
      }
    } else if (mode == Mode::Full) {
      // Outflow: one-sided convective flux; the prescribed diffusive flux q
      // moves to the right-hand side.
      const Vec2 b = prob.velocity(face.center.x, face.center.y);
      const double s = (b.x * face.normal.x + b.y * face.normal.y) * face.measure;
      trip.push_back({blk, blk, s});
      if (f_out) (*f_out)[blk] -= prob.outflow(face.center.x, face.center.y) * face.measure;
    }
  }

  if (f_out && mode == Mode::Full) {
    for (index_t cell = 0; cell < grid.cell_count(); ++cell) {
      const index_t blk = cell_map[cell];
      if (blk < 0) continue;
      const Vec2 c = grid.cell_center(cell);
      (*f_out)[blk] += prob.source(c.x, c.y) * grid.cell_volume();
    }
  }
  return SparseMatrix::from_triplets(n_blocks, n_blocks, std::move(trip));
}

}  // namespace

DiscreteSystem assemble_ccfv(std::shared_ptr<const Grid> grid, std::shared_ptr<const ProblemSpec> prob) {
  if (prob->diffusion.size() != static_cast<std::size_t>(grid->cell_count()) ||
      prob->eig_diffusion.size() != prob->diffusion.size())
    throw std::invalid_argument("assemble_ccfv: diffusion field size does not match the grid");

  DiscreteSystem sys;
  sys.dofs_per_cell = 1;
  sys.backend = Discretization::CCFV;
  sys.grid = std::move(grid);
  sys.problem = std::move(prob);

  std::vector<index_t> map(static_cast<std::size_t>(sys.grid->cell_count()));
  for (index_t c = 0; c < sys.grid->cell_count(); ++c) map[static_cast<std::size_t>(c)] = c;
  sys.B = assemble_ccfv_matrix(*sys.grid, *sys.problem, Mode::Full, map, sys.grid->cell_count(), &sys.F).pruned(0.0);
  sys.A_a = assemble_ccfv_matrix(*sys.grid, *sys.problem, Mode::AForm, map, sys.grid->cell_count(), nullptr).pruned(0.0);
  return sys;
}

SparseMatrix ccfv_local_aform(const DiscreteSystem& sys, std::span<const index_t> cells) {
  std::vector<index_t> map(static_cast<std::size_t>(sys.grid->cell_count()), -1);
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k > 0 && cells[k] <= cells[k - 1]) throw std::invalid_argument("local_aform: cell set not sorted/unique");
    map[cells[k]] = static_cast<index_t>(k);
  }
  return assemble_ccfv_matrix(*sys.grid, *sys.problem, Mode::AForm, map, static_cast<index_t>(cells.size()), nullptr);
}

}  // namespace msras
