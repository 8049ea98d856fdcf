#pragma once

#include <cstdint>
#include <vector>

#include "msras/pencil.hpp"

namespace msras {

struct LanczosOptions {
  int max_subspace = 0;  // 0 -> 4*nev + 20
  double tol = 1e-9;     // convergence tolerance on the pencil residual
  double flag_tol = 1e-8;
  int max_restarts = 60;
  std::uint64_t seed = 42;
};

/// Spectrum of one subdomain pencil, eigenvalues in non-ascending order with
/// a +infinity sentinel first when the constant mode exists. Eigenvectors are
/// the primal parts, normalized to unit a-seminorm (unit Euclidean norm when
/// the a-seminorm underflows).
struct SubdomainSpectrum {
  std::vector<double> eigenvalues;
  std::vector<std::vector<double>> vectors;
  std::vector<double> residuals;  // relative pencil residuals
  std::vector<char> flagged;      // residual above flag_tol

  std::size_t size() const { return eigenvalues.size(); }
};

/// Shift-invert thick-restart Lanczos for the `nev` largest eigenvalues of
/// lambda K x = Mw x, run in the Mw-semi-inner product on the operator
/// x -> K^{-1} Mw x. A singular K (constant harmonic kernel) is deflated by
/// one augmented row pinning the A_chi-weighted mean, and the +infinity
/// eigenpair (constant) is recorded explicitly.
SubdomainSpectrum solve_pencil(const EigenPencil& pencil, int nev, const LanczosOptions& opts = {});

struct DecayFit {
  double slope = 0.0;  // of log(lambda_k) against sqrt(k)
  double r2 = 0.0;
  int points = 0;
};

/// Least-squares fit of log(lambda_k) vs sqrt(k) over k in [k_min, k_max]
/// (1-based, +infinity and non-positive values skipped).
DecayFit decay_fit(const std::vector<double>& eigenvalues, int k_min, int k_max);

}  // namespace msras
