#include "msras/pencil.hpp"

#include <algorithm>
#include <stdexcept>

namespace msras {

EigenPencil assemble_pencil(const DiscreteSystem& system, const Decomposition& decomp, int subdomain) {
  const auto& os_cells = decomp.oversample_cells.at(static_cast<std::size_t>(subdomain));
  const auto& os_dofs = decomp.oversample_dofs.at(static_cast<std::size_t>(subdomain));
  if (os_dofs.empty()) throw std::invalid_argument("assemble_pencil: empty oversampling DOF set");
  const Grid& grid = *system.grid;

  EigenPencil p;
  p.os_dofs = os_dofs;
  p.n_primal = static_cast<index_t>(os_dofs.size());

  std::vector<char> in_os(static_cast<std::size_t>(grid.cell_count()), 0);
  for (index_t c : os_cells) in_os[c] = 1;

  // Constraint test cells: all face neighbors inside omega_j^*. This leaves
  // out exactly the layer touching the artificial boundary, the discrete
  // analogue of test functions vanishing there.
  std::vector<index_t> constraint_dofs;
  p.constraint_local.clear();
  for (std::size_t k = 0; k < os_cells.size(); ++k) {
    const index_t c = os_cells[k];
    bool interior = true;
    for (index_t nb : grid.neighbors(c))
      if (!in_os[nb]) {
        interior = false;
        break;
      }
    if (!interior) continue;
    for (int d = 0; d < decomp.dofs_per_cell; ++d) {
      constraint_dofs.push_back(c * decomp.dofs_per_cell + d);
      p.constraint_local.push_back(static_cast<index_t>(k) * decomp.dofs_per_cell + d);
    }
  }
  p.n_constraint = static_cast<index_t>(constraint_dofs.size());
  if (p.n_constraint == 0) throw std::invalid_argument("assemble_pencil: empty constraint set");

  // Harmonic-constraint rows from the global operator; constraint test rows
  // never touch crossing faces, so the submatrix rows equal submesh rows.
  p.constraint = submatrix(system.B, constraint_dofs, os_dofs);

  // a-form on the submesh, symmetrized exactly (assembly order may leave
  // ulp-level asymmetry).
  p.a_local = symmetric_part(system.local_aform(os_cells));

  // PU weights of omega_j extended by zero to omega_j^*.
  const auto& ov_dofs = decomp.overlap_dofs.at(static_cast<std::size_t>(subdomain));
  const auto& pu = decomp.pu.at(static_cast<std::size_t>(subdomain));
  p.pu_on_os.assign(os_dofs.size(), 0.0);
  {
    std::size_t i = 0;
    for (std::size_t k = 0; k < ov_dofs.size(); ++k) {
      while (i < os_dofs.size() && os_dofs[i] < ov_dofs[k]) ++i;
      if (i >= os_dofs.size() || os_dofs[i] != ov_dofs[k])
        throw std::logic_error("assemble_pencil: overlap DOFs not nested in oversample DOFs");
      p.pu_on_os[i] = pu[k];
    }
  }
  const SparseMatrix a_chi = scale_rows_cols(p.a_local, p.pu_on_os, p.pu_on_os).pruned(0.0);

  // Constant-kernel probe: lambda = +infinity exists iff the constant lies in
  // the harmonic space and is a-null (interior subdomain, divergence-free b).
  {
    std::vector<double> ones(static_cast<std::size_t>(p.n_primal), 1.0);
    const double a_res = norm_inf(p.a_local.multiply(ones));
    const double c_res = norm_inf(p.constraint.multiply(ones));
    const double a_scale = std::max(p.a_local.max_abs(), 1e-300);
    const double c_scale = std::max(p.constraint.max_abs(), 1e-300);
    p.constant_kernel = a_res <= 1e-10 * a_scale && c_res <= 1e-10 * c_scale;
  }

  // Block assembly of K and Mw.
  const index_t n = p.n_primal + p.n_constraint;
  std::vector<Triplet> ktrip;
  ktrip.reserve(static_cast<std::size_t>(p.a_local.nnz() + 2 * p.constraint.nnz()));
  for (index_t r = 0; r < p.a_local.rows(); ++r) {
    auto rc = p.a_local.row_cols(r);
    auto rv = p.a_local.row_values(r);
    for (std::size_t k = 0; k < rc.size(); ++k) ktrip.push_back({r, rc[k], rv[k]});
  }
  for (index_t r = 0; r < p.constraint.rows(); ++r) {
    auto rc = p.constraint.row_cols(r);
    auto rv = p.constraint.row_values(r);
    for (std::size_t k = 0; k < rc.size(); ++k) {
      ktrip.push_back({p.n_primal + r, rc[k], rv[k]});
      ktrip.push_back({rc[k], p.n_primal + r, rv[k]});
    }
  }
  p.K = SparseMatrix::from_triplets(n, n, std::move(ktrip));

  std::vector<Triplet> mtrip;
  mtrip.reserve(static_cast<std::size_t>(a_chi.nnz()));
  for (index_t r = 0; r < a_chi.rows(); ++r) {
    auto rc = a_chi.row_cols(r);
    auto rv = a_chi.row_values(r);
    for (std::size_t k = 0; k < rc.size(); ++k) mtrip.push_back({r, rc[k], rv[k]});
  }
  p.Mw = SparseMatrix::from_triplets(n, n, std::move(mtrip));
  return p;
}

}  // namespace msras
