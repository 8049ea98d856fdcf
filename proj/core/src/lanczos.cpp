#include "msras/eigensolver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include "msras/factorization.hpp"

namespace msras {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Solver for K z = y, routing through a one-row augmented system when the
/// pencil has the constant harmonic kernel (or K reports singularity).
class PencilSolver {
public:
  explicit PencilSolver(const EigenPencil& pencil) : n_(pencil.K.rows()) {
    if (!pencil.constant_kernel) {
      try {
        lu_.emplace(pencil.K);
        return;
      } catch (const SingularMatrixError&) {
        // fall through to the deflated factorization
      }
    }
    deflated_ = true;
    // Pin vector m = Mw * (1_primal, 0). Finite eigenvectors satisfy
    // a_chi(1, phi) = 0, so pinning this weighted mean leaves them exact
    // while removing the constant kernel direction.
    std::vector<double> ones(static_cast<std::size_t>(n_), 0.0);
    for (index_t i = 0; i < pencil.n_primal; ++i) ones[i] = 1.0;
    std::vector<double> pin = pencil.Mw.multiply(ones);

    std::vector<Triplet> trip;
    trip.reserve(static_cast<std::size_t>(pencil.K.nnz()) + 2 * static_cast<std::size_t>(n_));
    for (index_t r = 0; r < n_; ++r) {
      auto rc = pencil.K.row_cols(r);
      auto rv = pencil.K.row_values(r);
      for (std::size_t k = 0; k < rc.size(); ++k) trip.push_back({r, rc[k], rv[k]});
    }
    for (index_t i = 0; i < n_; ++i) {
      if (pin[i] != 0.0) {
        trip.push_back({i, n_, pin[i]});
        trip.push_back({n_, i, pin[i]});
      }
    }
    lu_.emplace(SparseMatrix::from_triplets(n_ + 1, n_ + 1, std::move(trip)));
  }

  std::vector<double> solve(std::span<const double> y) const {
    if (!deflated_) return lu_->solve(y);
    std::vector<double> rhs(y.begin(), y.end());
    rhs.push_back(0.0);
    std::vector<double> z = lu_->solve(rhs);
    z.pop_back();
    return z;
  }

private:
  index_t n_;
  std::optional<Factorization> lu_;
  bool deflated_ = false;
};

struct RitzPair {
  double value = 0.0;
  std::vector<double> vector;
};

}  // namespace

SubdomainSpectrum solve_pencil(const EigenPencil& pencil, int nev, const LanczosOptions& opts) {
  if (nev < 1) throw std::invalid_argument("solve_pencil: nev must be >= 1");
  const index_t n = pencil.K.rows();

  SubdomainSpectrum out;
  if (pencil.constant_kernel) {
    // lambda = +infinity: constant harmonic function with zero a-seminorm.
    std::vector<double> c(static_cast<std::size_t>(pencil.n_primal), 1.0 / std::sqrt(static_cast<double>(pencil.n_primal)));
    out.eigenvalues.push_back(kInf);
    out.vectors.push_back(std::move(c));
    out.residuals.push_back(0.0);
    out.flagged.push_back(0);
  }
  const int nev_finite = nev - static_cast<int>(out.size());
  if (nev_finite < 1) return out;

  PencilSolver op(pencil);
  if (pencil.Mw.max_abs() == 0.0) return out;  // no finite modes

  const int m_max =
      std::max(3, std::min<int>(opts.max_subspace > 0 ? opts.max_subspace : 4 * nev_finite + 20, static_cast<int>(n)));

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);

  // Lanczos basis with cached Mw products. With full reorthogonalization the
  // projected matrix is tridiagonal up to the thick-restart arrow entries;
  // t_proj stores it densely (column k completed = operator applied to v_k).
  std::vector<std::vector<double>> basis, mw_basis;
  Eigen::MatrixXd t_proj = Eigen::MatrixXd::Zero(m_max + 1, m_max + 1);

  auto mw_normalize = [&](std::vector<double>& v, std::vector<double>& mwv) -> double {
    mwv = pencil.Mw.multiply(v);
    const double beta2 = dot(v, mwv);
    if (beta2 <= 0.0) return 0.0;
    const double beta = std::sqrt(beta2);
    scale(1.0 / beta, v);
    scale(1.0 / beta, mwv);
    return beta;
  };

  // Purified random start: one operator application kills ker(Mw) components.
  auto fresh_start = [&]() -> bool {
    std::vector<double> r(static_cast<std::size_t>(n));
    for (double& e : r) e = dist(rng);
    std::vector<double> v = op.solve(pencil.Mw.multiply(r));
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t i = 0; i < basis.size(); ++i) {
        const double c = dot(v, mw_basis[i]);
        axpy(-c, basis[i], v);
      }
    std::vector<double> mwv;
    if (mw_normalize(v, mwv) <= 1e-280) return false;
    basis.push_back(std::move(v));
    mw_basis.push_back(std::move(mwv));
    return true;
  };

  if (!fresh_start()) return out;

  int restarts = 0;
  std::vector<RitzPair> ritz_out;

  while (true) {
    // Expand until m_max completed columns or breakdown. Column k completed
    // means basis[k+1] exists (except at breakdown).
    bool breakdown = false;
    while (static_cast<int>(basis.size()) <= m_max) {
      const int k = static_cast<int>(basis.size()) - 1;
      std::vector<double> w = op.solve(mw_basis[static_cast<std::size_t>(k)]);
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t i = 0; i < basis.size(); ++i) {
          const double c = dot(w, mw_basis[i]);
          axpy(-c, basis[i], w);
          t_proj(static_cast<Eigen::Index>(i), k) += c;
        }
      }
      std::vector<double> mww;
      const double beta = mw_normalize(w, mww);
      if (beta <= 1e-13 * std::max(1.0, std::abs(t_proj(k, k)))) {
        breakdown = true;
        break;
      }
      t_proj(k + 1, k) = beta;
      basis.push_back(std::move(w));
      mw_basis.push_back(std::move(mww));
    }

    const int m = breakdown ? static_cast<int>(basis.size()) : static_cast<int>(basis.size()) - 1;
    const double beta_last = breakdown ? 0.0 : t_proj(m, m - 1);

    Eigen::MatrixXd tm = t_proj.topLeftCorner(m, m);
    tm = (0.5 * (tm + tm.transpose())).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tm);
    const Eigen::VectorXd& theta = es.eigenvalues();  // ascending
    const Eigen::MatrixXd& y = es.eigenvectors();
    const double theta_scale = std::max(theta.cwiseAbs().maxCoeff(), 1e-300);

    const int want = std::min(nev_finite, m);
    int n_conv = 0;
    for (int i = 0; i < want; ++i) {
      const double res = std::abs(beta_last * y(m - 1, m - 1 - i));
      if (res <= opts.tol * theta_scale) ++n_conv;
    }

    const bool force_exit = breakdown || restarts >= opts.max_restarts;
    if (n_conv >= want || force_exit) {
      ritz_out.clear();
      for (int i = 0; i < want; ++i) {
        RitzPair p;
        p.value = theta(m - 1 - i);
        p.vector.assign(static_cast<std::size_t>(n), 0.0);
        for (int k = 0; k < m; ++k) axpy(y(k, m - 1 - i), basis[static_cast<std::size_t>(k)], p.vector);
        ritz_out.push_back(std::move(p));
      }
      // Accept only when the explicit pencil residuals meet the tolerance
      // (the Krylov estimate uses a different normalization). Numerically
      // zero Ritz values are exempt: they are never selectable.
      bool accepted = true;
      if (!force_exit) {
        const double k_scale = std::max(pencil.K.max_abs(), 1e-300);
        for (const RitzPair& p : ritz_out) {
          if (p.value <= 1e-10 * theta_scale) continue;
          std::vector<double> rvec = pencil.Mw.multiply(p.vector);
          axpy(-p.value, pencil.K.multiply(p.vector), rvec);
          const double rel = norm2(rvec) / (p.value * k_scale * std::max(norm2(p.vector), 1e-300));
          if (rel > opts.tol) {
            accepted = false;
            break;
          }
        }
      }
      if (breakdown && want < nev_finite && restarts < opts.max_restarts) {
        ++restarts;
        if (fresh_start()) continue;  // enlarge the invariant subspace
      }
      if (accepted || force_exit) break;
      ritz_out.clear();
    }

    // Thick restart: keep leading Ritz vectors plus the continuation vector;
    // completed columns i get the arrow entry at row `keep`, the upper
    // counterparts are re-derived by the Gram-Schmidt pass of column `keep`.
    ++restarts;
    const int keep = std::min(m - 1, nev_finite + std::max(4, nev_finite / 2));
    std::vector<std::vector<double>> new_basis, new_mw;
    new_basis.reserve(static_cast<std::size_t>(keep) + 1);
    new_mw.reserve(static_cast<std::size_t>(keep) + 1);
    Eigen::MatrixXd t_new = Eigen::MatrixXd::Zero(m_max + 1, m_max + 1);
    for (int i = 0; i < keep; ++i) {
      std::vector<double> v(static_cast<std::size_t>(n), 0.0), mwv(static_cast<std::size_t>(n), 0.0);
      for (int k = 0; k < m; ++k) {
        axpy(y(k, m - 1 - i), basis[static_cast<std::size_t>(k)], v);
        axpy(y(k, m - 1 - i), mw_basis[static_cast<std::size_t>(k)], mwv);
      }
      t_new(i, i) = theta(m - 1 - i);
      t_new(keep, i) = beta_last * y(m - 1, m - 1 - i);
      new_basis.push_back(std::move(v));
      new_mw.push_back(std::move(mwv));
    }
    new_basis.push_back(std::move(basis.back()));
    new_mw.push_back(std::move(mw_basis.back()));
    basis = std::move(new_basis);
    mw_basis = std::move(new_mw);
    t_proj = std::move(t_new);
  }

  // Explicit pencil residuals, primal extraction, a-seminorm normalization.
  const double k_norm = std::max(pencil.K.max_abs(), 1e-300);
  std::sort(ritz_out.begin(), ritz_out.end(), [](const RitzPair& a, const RitzPair& b) { return a.value > b.value; });

  for (RitzPair& p : ritz_out) {
    if (static_cast<int>(out.size()) >= nev) break;
    const double lambda = std::max(p.value, 0.0);
    std::vector<double> rvec = pencil.Mw.multiply(p.vector);
    std::vector<double> kx = pencil.K.multiply(p.vector);
    axpy(-lambda, kx, rvec);
    const double xnorm = norm2(p.vector);
    const double rel = norm2(rvec) / (std::max(lambda, 1e-300) * k_norm * std::max(xnorm, 1e-300));

    std::vector<double> primal(p.vector.begin(), p.vector.begin() + pencil.n_primal);
    const double a_semi2 = dot(primal, pencil.a_local.multiply(primal));
    const double a_semi = a_semi2 > 0.0 ? std::sqrt(a_semi2) : 0.0;
    const double euclid = norm2(primal);
    if (euclid <= 0.0) continue;
    if (a_semi > 1e-13 * euclid * std::sqrt(std::max(pencil.a_local.max_abs(), 1e-300)))
      scale(1.0 / a_semi, primal);
    else
      scale(1.0 / euclid, primal);

    out.eigenvalues.push_back(lambda);
    out.vectors.push_back(std::move(primal));
    out.residuals.push_back(rel);
    out.flagged.push_back(rel > opts.flag_tol ? 1 : 0);
  }
  return out;
}

DecayFit decay_fit(const std::vector<double>& eigenvalues, int k_min, int k_max) {
  DecayFit fit;
  std::vector<double> xs, ys;
  for (int k = k_min; k <= k_max && k <= static_cast<int>(eigenvalues.size()); ++k) {
    const double lambda = eigenvalues[static_cast<std::size_t>(k - 1)];
    if (!std::isfinite(lambda) || lambda <= 0.0) continue;
    xs.push_back(std::sqrt(static_cast<double>(k)));
    ys.push_back(std::log(lambda));
  }
  fit.points = static_cast<int>(xs.size());
  if (fit.points < 3) return fit;
  const double n = static_cast<double>(fit.points);
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < fit.points; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
    syy += ys[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  const double ss_tot = syy - sy * sy / n;
  const double ss_res = ss_tot - fit.slope * (sxy - sx * sy / n);
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
  return fit;
}

}  // namespace msras
