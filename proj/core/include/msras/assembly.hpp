#pragma once

#include <memory>
#include <span>
#include <vector>

#include "msras/grid.hpp"
#include "msras/problem.hpp"
#include "msras/sparse.hpp"

namespace msras {

enum class Discretization { DG, CCFV };

/// Parameters of the weighted symmetric interior penalty DG method with
/// upwinding. Only degree 1 (tensor-product Q1, 4 DOFs per cell) is supported.
struct DGParams {
  double alpha = 3.0;  // penalty scale
  int degree = 1;
};

/// Discretized system B u = F together with the symmetric diffusion-only
/// matrix A_a realizing the a-inner-product. DOFs are cell blocks:
/// dof = cell * dofs_per_cell + local.
struct DiscreteSystem {
  SparseMatrix B;
  SparseMatrix A_a;
  std::vector<double> F;
  int dofs_per_cell = 1;
  Discretization backend = Discretization::DG;
  std::shared_ptr<const Grid> grid;
  std::shared_ptr<const ProblemSpec> problem;
  DGParams params;

  index_t n_dofs() const { return B.rows(); }
  index_t n_cells() const { return grid->cell_count(); }

  /// Assembles the a-inner-product form on the submesh spanned by `cells`
  /// (sorted, unique): volume diffusion, interior faces of the submesh, and
  /// faces on the global Dirichlet boundary. Faces on the artificial
  /// boundary of the cell set and on the outflow boundary contribute
  /// nothing. Uses the eigenproblem's (surrogate) diffusion field. Local DOF
  /// k of the result corresponds to the k-th entry of the block-expanded,
  /// sorted cell list.
  SparseMatrix local_aform(std::span<const index_t> cells) const;

  /// Coordinate associated with a DOF: the Q1 corner node (DG) or the cell
  /// center (CCFV).
  Vec2 dof_position(index_t dof) const;
};

/// Weighted SIPG-DG with upwinding (Q1 on squares). Assembles B (volume,
/// interior-face, boundary and Dirichlet terms), F (source, outflow and
/// Dirichlet data including the inflow contribution) and A_a (symmetric
/// diffusion pieces only).
DiscreteSystem assemble_dg(std::shared_ptr<const Grid> grid, std::shared_ptr<const ProblemSpec> prob, const DGParams& params = {});
inline DiscreteSystem assemble_dg(const Model& model, const DGParams& params = {}) {
  return assemble_dg(model.grid, model.problem, params);
}

/// Cell-centered finite volume: two-point flux with distance-harmonic
/// diffusion averaging, full upwinding of convection, Dirichlet ghost-value
/// elimination and one-sided outflow flux.
DiscreteSystem assemble_ccfv(std::shared_ptr<const Grid> grid, std::shared_ptr<const ProblemSpec> prob);
inline DiscreteSystem assemble_ccfv(const Model& model) { return assemble_ccfv(model.grid, model.problem); }

/// Interior-penalty coefficient sigma_gamma: alpha times the harmonic
/// average of the normal diffusion values times p(p+d-1) |gamma| / min |tau|.
double dg_penalty(const DGParams& params, double a_minus, double a_plus, double face_measure, double min_cell_volume);

/// Diffusion-dependent face weights (w_minus, w_plus); (1/2, 1/2) when both
/// normal diffusions vanish.
std::pair<double, double> dg_face_weights(double a_minus, double a_plus);

/// Basis-weighted evaluation of the discrete solution at arbitrary points
/// inside the domain. Throws for points outside.
std::vector<double> evaluate_solution(const DiscreteSystem& system, std::span<const double> u, std::span<const Vec2> points);

/// || u_h - exact ||_{L2(domain)} by per-cell Gauss quadrature.
double l2_error(const DiscreteSystem& system, std::span<const double> u, const ScalarField& exact);

/// Nodal interpolation (DG: corner values; CCFV: cell-center values).
std::vector<double> interpolate(const DiscreteSystem& system, const ScalarField& f);

}  // namespace msras
