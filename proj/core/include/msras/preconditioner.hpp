#pragma once

#include <memory>
#include <optional>

#include "msras/assembly.hpp"
#include "msras/coarse.hpp"
#include "msras/decomposition.hpp"
#include "msras/factorization.hpp"

namespace msras {

enum class PrecMode { OneLevel, TwoLevelHybrid, CoarseOnly };

/// One- and two-level hybrid restricted additive Schwarz preconditioner:
///   one-level:  z = sum_j R_j^T Xi_j B_j^-1 R_j r
///   two-level:  z = z_1 + R_S^T B_S^-1 R_S (r - B z_1)
/// Subdomain solves reuse precomputed LU factors and run in parallel; the
/// scatter-add into the global vector is done in fixed subdomain order, so
/// results are independent of the worker count.
class Preconditioner {
public:
  Preconditioner(const DiscreteSystem& system, const Decomposition& decomp, PrecMode mode,
                 std::shared_ptr<const CoarseSpace> coarse = nullptr, int workers = 1);

  std::vector<double> apply(std::span<const double> r) const;
  std::vector<double> apply_one_level(std::span<const double> r) const;
  std::vector<double> apply_two_level(std::span<const double> r) const;
  std::vector<double> apply_coarse(std::span<const double> r) const;

  PrecMode mode() const { return mode_; }
  index_t dim() const { return n_; }
  index_t coarse_dim() const { return coarse_ ? coarse_->dim() : 0; }
  const CoarseSpace* coarse_space() const { return coarse_.get(); }
  int subdomains() const { return static_cast<int>(blocks_.size()); }

  /// Re-verifies B_j == submatrix(B, dofs_overlap[j], dofs_overlap[j]) by
  /// random-vector probing of the stored factorizations.
  bool verify_blocks(int n_probes = 3, double tol = 1e-9) const;

private:
  struct Block {
    std::vector<index_t> dofs;
    std::vector<double> weights;
    std::shared_ptr<const Factorization> lu;
  };

  const SparseMatrix* b_ = nullptr;
  index_t n_ = 0;
  PrecMode mode_ = PrecMode::OneLevel;
  std::vector<Block> blocks_;
  std::shared_ptr<const CoarseSpace> coarse_;
  int workers_ = 1;
};

/// sqrt((u - uref)^T A_a (u - uref)), clamped at zero for tiny negatives.
double a_norm_error(std::span<const double> u, std::span<const double> uref, const SparseMatrix& a_a);

}  // namespace msras
