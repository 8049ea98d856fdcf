#pragma once

#include <vector>

#include "msras/assembly.hpp"
#include "msras/decomposition.hpp"
#include "msras/sparse.hpp"

namespace msras {

/// Saddle-point eigenpencil lambda * K x = Mw x on an oversampling domain:
///   K  = [[A_a^os, B_c^T], [B_c, 0]],   Mw = [[A_chi, 0], [0, 0]],
/// where A_a^os is the a-form on the submesh, B_c the harmonic-constraint
/// rows (test DOFs on cells whose face neighbors all lie in omega_j^*) and
/// A_chi the PU-weighted a-form. K is exactly symmetric by construction.
struct EigenPencil {
  SparseMatrix K;
  SparseMatrix Mw;
  SparseMatrix a_local;  // primal block, used for a-seminorm normalization
  SparseMatrix constraint;  // B_c (n_constraint x n_primal)
  index_t n_primal = 0;
  index_t n_constraint = 0;
  std::vector<index_t> os_dofs;           // global DOFs of omega_j^*
  std::vector<index_t> constraint_local;  // primal-local indices of the constraint test DOFs
  std::vector<double> pu_on_os;           // PU weights extended by zero to omega_j^*
  /// True when the constant primal vector lies in the discrete harmonic
  /// space with vanishing a-seminorm (the lambda = +infinity case).
  bool constant_kernel = false;
};

EigenPencil assemble_pencil(const DiscreteSystem& system, const Decomposition& decomp, int subdomain);

}  // namespace msras
