#include "msras/preconditioner.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "msras/parallel.hpp"

namespace msras {

Preconditioner::Preconditioner(const DiscreteSystem& system, const Decomposition& decomp, PrecMode mode,
                               std::shared_ptr<const CoarseSpace> coarse, int workers)
    : b_(&system.B), n_(system.n_dofs()), mode_(mode), coarse_(std::move(coarse)), workers_(std::max(1, workers)) {
  if (mode_ != PrecMode::OneLevel && (!coarse_ || (coarse_->dim() > 0 && !coarse_->galerkin_lu)))
    throw std::invalid_argument("Preconditioner: coarse space required for this mode");
  if (mode_ == PrecMode::CoarseOnly) {
    if (!coarse_ || coarse_->dim() == 0) throw std::invalid_argument("Preconditioner: coarse-only mode needs a nonempty coarse space");
    return;
  }

  blocks_.resize(static_cast<std::size_t>(decomp.size()));
  parallel_for_index(decomp.size(), workers_, [&](int j) {
    Block& blk = blocks_[static_cast<std::size_t>(j)];
    blk.dofs = decomp.overlap_dofs[static_cast<std::size_t>(j)];
    blk.weights = decomp.pu[static_cast<std::size_t>(j)];
    blk.lu = std::make_shared<Factorization>(submatrix(system.B, blk.dofs, blk.dofs));
  });
}

std::vector<double> Preconditioner::apply_one_level(std::span<const double> r) const {
  if (static_cast<index_t>(r.size()) != n_) throw std::invalid_argument("apply_one_level: dimension mismatch");
  std::vector<std::vector<double>> locals(blocks_.size());
  parallel_for_index(static_cast<int>(blocks_.size()), workers_, [&](int j) {
    const Block& blk = blocks_[static_cast<std::size_t>(j)];
    locals[static_cast<std::size_t>(j)] = blk.lu->solve(restriction_apply(blk.dofs, r));
  });
  std::vector<double> z(static_cast<std::size_t>(n_), 0.0);
  for (std::size_t j = 0; j < blocks_.size(); ++j)
    prolong_add(blocks_[j].dofs, blocks_[j].weights, locals[j], z);
  return z;
}

std::vector<double> Preconditioner::apply_coarse(std::span<const double> r) const {
  std::vector<double> rc(static_cast<std::size_t>(coarse_->dim()));
  coarse_->basis.multiply(r, rc);
  rc = coarse_->galerkin_lu->solve(rc);
  std::vector<double> z(static_cast<std::size_t>(n_));
  coarse_->basis.multiply_transpose(rc, z);
  return z;
}

std::vector<double> Preconditioner::apply_two_level(std::span<const double> r) const {
  std::vector<double> z = apply_one_level(r);
  if (!coarse_ || coarse_->dim() == 0) return z;
  // multiplicative coarse correction on the residual r - B z
  std::vector<double> res = b_->multiply(z);
  for (std::size_t i = 0; i < res.size(); ++i) res[i] = r[i] - res[i];
  axpy(1.0, apply_coarse(res), z);
  return z;
}

std::vector<double> Preconditioner::apply(std::span<const double> r) const {
  switch (mode_) {
    case PrecMode::OneLevel: return apply_one_level(r);
    case PrecMode::TwoLevelHybrid: return apply_two_level(r);
    case PrecMode::CoarseOnly: return apply_coarse(r);
  }
  throw std::logic_error("Preconditioner::apply: bad mode");
}

bool Preconditioner::verify_blocks(int n_probes, double tol) const {
  for (const Block& blk : blocks_)
    if (!blk.lu->verify(n_probes, tol)) return false;
  return true;
}

double a_norm_error(std::span<const double> u, std::span<const double> uref, const SparseMatrix& a_a) {
  if (u.size() != uref.size() || static_cast<index_t>(u.size()) != a_a.rows())
    throw std::invalid_argument("a_norm_error: dimension mismatch");
  std::vector<double> d(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) d[i] = u[i] - uref[i];
  const double q = dot(d, a_a.multiply(d));
  return q > 0.0 ? std::sqrt(q) : 0.0;
}

}  // namespace msras
