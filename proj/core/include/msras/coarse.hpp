#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "msras/decomposition.hpp"
#include "msras/eigensolver.hpp"
#include "msras/factorization.hpp"
#include "msras/pencil.hpp"

namespace msras {

struct SelectionRule {
  enum class Kind { FixedCount, Threshold };
  Kind kind = Kind::Threshold;
  int n_sd = 0;            // FixedCount
  double lambda_max = 2.0; // Threshold

  static SelectionRule fixed(int n) { return {Kind::FixedCount, n, 0.0}; }
  static SelectionRule threshold(double lmax) { return {Kind::Threshold, 0, lmax}; }
};

/// Fixed rule: first n_sd modes (+infinity modes always included first);
/// threshold rule: all modes with lambda > lambda_max.
std::vector<int> select_modes(const SubdomainSpectrum& spectrum, const SelectionRule& rule);

/// Global coarse space: `basis` holds one coarse vector per row (this is
/// R_S; columns of R_S^T), `galerkin` the factorized coarse operator
/// B_S = R_S B R_S^T, and the per-subdomain mode counts.
struct CoarseSpace {
  SparseMatrix basis;
  SparseMatrix galerkin;
  std::shared_ptr<const Factorization> galerkin_lu;
  std::vector<int> modes_per_subdomain;

  index_t dim() const { return basis.rows(); }
};

/// Builds the MS-GFEM coarse space: column for mode k of subdomain j is the
/// PU-weighted eigenvector scattered from omega_j into the global vector;
/// B_S is formed by the sparse triple product and factorized. Columns whose
/// a-seminorm vanishes after PU weighting are dropped.
CoarseSpace build_coarse_space(const DiscreteSystem& system, const Decomposition& decomp,
                               const std::vector<SubdomainSpectrum>& spectra, const SelectionRule& rule);

/// PoU baseline: per subdomain the PU-weighted polynomials {1} (degree 0) or
/// {1, x - c_j, y - c_j} (degree 1) evaluated at DOF coordinates.
CoarseSpace build_pou_coarse_space(const DiscreteSystem& system, const Decomposition& decomp, int degree);

/// Coarse space from explicitly given basis rows (used for degenerate
/// full-space/identity setups and tests).
CoarseSpace make_coarse_space(const DiscreteSystem& system, SparseMatrix basis_rows, std::vector<int> modes_per_subdomain);

struct SpectrumOptions {
  int nev = 24;
  int nev_cap = 0;  // 0 -> primal dimension
  LanczosOptions lanczos;
};

/// Per-subdomain pencil assembly + eigensolve, embarrassingly parallel over
/// subdomains with deterministic (subdomain-ordered) results. For threshold
/// rules the eigensolve is repeated with a doubled window until the
/// threshold is bracketed.
std::vector<SubdomainSpectrum> compute_spectra(const DiscreteSystem& system, const Decomposition& decomp,
                                               const SelectionRule& rule, const SpectrumOptions& opts, int workers);

/// CSV dump: subdomain,k,lambda,residual ("inf" for the sentinel).
void write_spectra_csv(std::ostream& out, const std::vector<SubdomainSpectrum>& spectra);

}  // namespace msras
