#include "msras/coarse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "msras/parallel.hpp"

namespace msras {

std::vector<int> select_modes(const SubdomainSpectrum& spectrum, const SelectionRule& rule) {
  std::vector<int> modes;
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    const double lambda = spectrum.eigenvalues[k];
    if (rule.kind == SelectionRule::Kind::FixedCount) {
      if (static_cast<int>(modes.size()) >= rule.n_sd) break;
      modes.push_back(static_cast<int>(k));
    } else {
      if (std::isinf(lambda) || lambda > rule.lambda_max) modes.push_back(static_cast<int>(k));
    }
  }
  return modes;
}

namespace {

CoarseSpace finalize(const DiscreteSystem& system, std::vector<Triplet> basis_trip, index_t n_coarse,
                     std::vector<int> modes_per_subdomain) {
  CoarseSpace cs;
  cs.basis = SparseMatrix::from_triplets(n_coarse, system.n_dofs(), std::move(basis_trip));
  cs.modes_per_subdomain = std::move(modes_per_subdomain);
  if (n_coarse == 0) {
    cs.galerkin = SparseMatrix(0, 0);
    return cs;
  }
  cs.galerkin = triple_product(cs.basis, system.B, cs.basis.transpose());
  try {
    cs.galerkin_lu = std::make_shared<Factorization>(cs.galerkin);
  } catch (const SingularMatrixError& err) {
    std::string who = "unknown";
    if (err.pivot_index() >= 0) {
      index_t col = err.pivot_index();
      index_t acc = 0;
      for (std::size_t j = 0; j < cs.modes_per_subdomain.size(); ++j) {
        acc += cs.modes_per_subdomain[j];
        if (col < acc) {
          who = std::to_string(j);
          break;
        }
      }
    }
    throw SingularMatrixError(
        "build_coarse_space: coarse operator is rank deficient (offending subdomain " + who + "): " + err.what(),
        err.pivot_index());
  }
  return cs;
}

}  // namespace

CoarseSpace build_coarse_space(const DiscreteSystem& system, const Decomposition& decomp,
                               const std::vector<SubdomainSpectrum>& spectra, const SelectionRule& rule) {
  if (static_cast<int>(spectra.size()) != decomp.size())
    throw std::invalid_argument("build_coarse_space: need one spectrum per subdomain");

  std::vector<Triplet> trip;
  std::vector<int> counts(spectra.size(), 0);
  index_t row = 0;
  int dropped = 0;
  for (int j = 0; j < decomp.size(); ++j) {
    const auto& dofs = decomp.overlap_dofs[static_cast<std::size_t>(j)];
    const auto& weights = decomp.pu[static_cast<std::size_t>(j)];
    const auto& os_dofs = decomp.oversample_dofs[static_cast<std::size_t>(j)];
    // positions of overlap DOFs inside the (sorted) oversample DOF list
    std::vector<std::size_t> pos(dofs.size());
    {
      std::size_t i = 0;
      for (std::size_t k = 0; k < dofs.size(); ++k) {
        while (i < os_dofs.size() && os_dofs[i] < dofs[k]) ++i;
        pos[k] = i;
      }
    }
    const SubdomainSpectrum& spec = spectra[static_cast<std::size_t>(j)];
    for (int mode : select_modes(spec, rule)) {
      const auto& phi = spec.vectors[static_cast<std::size_t>(mode)];
      std::vector<double> column(dofs.size());
      for (std::size_t k = 0; k < dofs.size(); ++k) column[k] = weights[k] * phi[pos[k]];

      // Drop PU-weighted columns with vanishing global a-seminorm.
      double a2 = 0.0;
      {
        std::vector<double> g(static_cast<std::size_t>(system.n_dofs()), 0.0);
        for (std::size_t k = 0; k < dofs.size(); ++k) g[dofs[k]] = column[k];
        a2 = dot(column, restriction_apply(dofs, system.A_a.multiply(g)));
      }
      if (!(a2 > 0.0) || std::sqrt(a2) < 1e-13 * (1.0 + norm2(column))) {
        ++dropped;
        continue;
      }
      for (std::size_t k = 0; k < dofs.size(); ++k)
        if (column[k] != 0.0) trip.push_back({row, dofs[k], column[k]});
      ++row;
      ++counts[static_cast<std::size_t>(j)];
    }
  }
  (void)dropped;
  return finalize(system, std::move(trip), row, std::move(counts));
}

CoarseSpace build_pou_coarse_space(const DiscreteSystem& system, const Decomposition& decomp, int degree) {
  if (degree != 0 && degree != 1) throw std::invalid_argument("build_pou_coarse_space: degree must be 0 or 1");
  std::vector<Triplet> trip;
  std::vector<int> counts(static_cast<std::size_t>(decomp.size()), 0);
  index_t row = 0;
  for (int j = 0; j < decomp.size(); ++j) {
    const auto& dofs = decomp.overlap_dofs[static_cast<std::size_t>(j)];
    const auto& weights = decomp.pu[static_cast<std::size_t>(j)];
    Vec2 centroid{0.0, 0.0};
    for (index_t cell : decomp.overlap_cells[static_cast<std::size_t>(j)]) {
      const Vec2 c = system.grid->cell_center(cell);
      centroid.x += c.x;
      centroid.y += c.y;
    }
    const double inv = 1.0 / static_cast<double>(decomp.overlap_cells[static_cast<std::size_t>(j)].size());
    centroid.x *= inv;
    centroid.y *= inv;

    const int n_polys = degree == 0 ? 1 : 3;
    for (int p = 0; p < n_polys; ++p) {
      for (std::size_t k = 0; k < dofs.size(); ++k) {
        const Vec2 x = system.dof_position(dofs[k]);
        const double poly = p == 0 ? 1.0 : (p == 1 ? x.x - centroid.x : x.y - centroid.y);
        const double v = weights[k] * poly;
        if (v != 0.0) trip.push_back({row, dofs[k], v});
      }
      ++row;
      ++counts[static_cast<std::size_t>(j)];
    }
  }
  return finalize(system, std::move(trip), row, std::move(counts));
}

CoarseSpace make_coarse_space(const DiscreteSystem& system, SparseMatrix basis_rows, std::vector<int> modes_per_subdomain) {
  if (basis_rows.cols() != system.n_dofs()) throw std::invalid_argument("make_coarse_space: basis width mismatch");
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(basis_rows.nnz()));
  for (index_t r = 0; r < basis_rows.rows(); ++r) {
    auto rc = basis_rows.row_cols(r);
    auto rv = basis_rows.row_values(r);
    for (std::size_t k = 0; k < rc.size(); ++k) trip.push_back({r, rc[k], rv[k]});
  }
  return finalize(system, std::move(trip), basis_rows.rows(), std::move(modes_per_subdomain));
}

std::vector<SubdomainSpectrum> compute_spectra(const DiscreteSystem& system, const Decomposition& decomp,
                                               const SelectionRule& rule, const SpectrumOptions& opts, int workers) {
  std::vector<SubdomainSpectrum> spectra(static_cast<std::size_t>(decomp.size()));
  parallel_for_index(decomp.size(), workers, [&](int j) {
    const EigenPencil pencil = assemble_pencil(system, decomp, j);
    LanczosOptions lopts = opts.lanczos;
    lopts.seed = opts.lanczos.seed + static_cast<std::uint64_t>(j) * 7919;
    const int cap = opts.nev_cap > 0 ? opts.nev_cap : static_cast<int>(pencil.n_primal);
    int nev = rule.kind == SelectionRule::Kind::FixedCount ? std::max(1, rule.n_sd) : std::max(1, opts.nev);
    nev = std::min(nev, cap);
    for (;;) {
      lopts.max_subspace = 0;  // rescale with nev
      SubdomainSpectrum s = solve_pencil(pencil, nev, lopts);
      const bool bracketed = rule.kind != SelectionRule::Kind::Threshold || s.size() == 0 ||
                             (std::isfinite(s.eigenvalues.back()) && s.eigenvalues.back() <= rule.lambda_max) ||
                             static_cast<int>(s.size()) < nev;
      if (bracketed || nev >= cap) {
        spectra[static_cast<std::size_t>(j)] = std::move(s);
        break;
      }
      nev = std::min(2 * nev, cap);
    }
  });
  return spectra;
}

void write_spectra_csv(std::ostream& out, const std::vector<SubdomainSpectrum>& spectra) {
  out << "subdomain,k,lambda,residual\n";
  char buf[96];
  for (std::size_t j = 0; j < spectra.size(); ++j) {
    const SubdomainSpectrum& s = spectra[j];
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (std::isinf(s.eigenvalues[k]))
        std::snprintf(buf, sizeof buf, "%zu,%zu,inf,%.6e\n", j, k + 1, s.residuals[k]);
      else
        std::snprintf(buf, sizeof buf, "%zu,%zu,%.12e,%.6e\n", j, k + 1, s.eigenvalues[k], s.residuals[k]);
      out << buf;
    }
  }
}

}  // namespace msras
