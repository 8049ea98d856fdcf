#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "msras/preconditioner.hpp"
#include "msras/sparse.hpp"

namespace msras {

enum class KrylovVariant { Gmres, Richardson };

struct KrylovConfig {
  double epsilon = 1e-6;  // preconditioned residual reduction target
  int restart = 100;
  int max_iters = 1000;
  KrylovVariant variant = KrylovVariant::Gmres;
  bool track_true_residual = true;
};

struct SolveTimings {
  double assembly_s = 0.0;
  double eigen_s = 0.0;
  double factorization_s = 0.0;
  double solve_s = 0.0;
};

struct SolveReport {
  int iterations = 0;
  std::vector<double> prec_residuals;  // normalized, prec_residuals[0] == 1
  std::vector<double> true_residuals;  // same normalization against ||F - B u0||
  double achieved_reduction = 1.0;
  bool converged = false;
  bool breakdown = false;
  bool stagnated = false;
  bool diverged = false;
  int restarts = 0;
  index_t coarse_dim = 0;
  SolveTimings timings;

  /// CSV rows: k, preconditioned residual, true residual.
  void write_csv(std::ostream& out) const;
};

using IterationObserver = std::function<void(int, std::span<const double>)>;

/// Left-preconditioned restarted GMRES (modified Gram-Schmidt with one
/// reorthogonalization pass, Givens least squares). Stops once
/// |M(F - B u)| < epsilon |M(F - B u0)| or max_iters is reached.
std::pair<std::vector<double>, SolveReport> gmres(const SparseMatrix& b, const Preconditioner& prec,
                                                  std::span<const double> f, const KrylovConfig& cfg,
                                                  std::span<const double> u0 = {},
                                                  const IterationObserver& observer = nullptr);

/// Preconditioned Richardson iteration u <- u + M (F - B u) with the same
/// stopping rule; flags divergence on 10 consecutive residual increases.
std::pair<std::vector<double>, SolveReport> richardson(const SparseMatrix& b, const Preconditioner& prec,
                                                       std::span<const double> f, const KrylovConfig& cfg,
                                                       std::span<const double> u0 = {},
                                                       const IterationObserver& observer = nullptr);

}  // namespace msras
