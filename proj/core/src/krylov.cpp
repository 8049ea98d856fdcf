#include "msras/krylov.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace msras {

void SolveReport::write_csv(std::ostream& out) const {
  out << "k,prec_residual,true_residual\n";
  char buf[96];
  for (std::size_t k = 0; k < prec_residuals.size(); ++k) {
    const double tr = k < true_residuals.size() ? true_residuals[k] : -1.0;
    std::snprintf(buf, sizeof buf, "%zu,%.12e,%.12e\n", k, prec_residuals[k], tr);
    out << buf;
  }
}

namespace {

std::vector<double> residual(const SparseMatrix& b, std::span<const double> f, std::span<const double> u) {
  std::vector<double> r = b.multiply(u);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = f[i] - r[i];
  return r;
}

}  // namespace

std::pair<std::vector<double>, SolveReport> gmres(const SparseMatrix& b, const Preconditioner& prec,
                                                  std::span<const double> f, const KrylovConfig& cfg,
                                                  std::span<const double> u0, const IterationObserver& observer) {
  const index_t n = b.rows();
  if (static_cast<index_t>(f.size()) != n) throw std::invalid_argument("gmres: rhs dimension mismatch");
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) throw std::invalid_argument("gmres: epsilon must lie in (0, 1)");
  if (cfg.restart < 1) throw std::invalid_argument("gmres: restart must be >= 1");

  std::vector<double> u(u0.empty() ? std::vector<double>(static_cast<std::size_t>(n), 0.0)
                                   : std::vector<double>(u0.begin(), u0.end()));
  SolveReport report;
  report.coarse_dim = prec.coarse_dim();

  std::vector<double> r = residual(b, f, u);
  const double true0 = std::max(norm2(r), 1e-300);
  std::vector<double> z = prec.apply(r);
  const double prec0 = norm2(z);
  report.prec_residuals.push_back(1.0);
  if (cfg.track_true_residual) report.true_residuals.push_back(1.0);
  if (observer) observer(0, u);
  if (prec0 == 0.0) {
    report.converged = true;
    report.achieved_reduction = 0.0;
    return {std::move(u), std::move(report)};
  }

  const int m = cfg.restart;
  std::vector<std::vector<double>> v;
  std::vector<double> h((static_cast<std::size_t>(m) + 1) * static_cast<std::size_t>(m), 0.0);
  auto hij = [&](int i, int j) -> double& { return h[static_cast<std::size_t>(i) * static_cast<std::size_t>(m) + static_cast<std::size_t>(j)]; };
  std::vector<double> cs(static_cast<std::size_t>(m)), sn(static_cast<std::size_t>(m)), g(static_cast<std::size_t>(m) + 1);

  int total_iters = 0;
  bool done = false;
  double last_cycle_start = 1.0;

  while (!done && total_iters < cfg.max_iters) {
    // (re)start cycle from the current iterate
    r = residual(b, f, u);
    z = prec.apply(r);
    double beta = norm2(z);
    if (beta / prec0 < cfg.epsilon) {
      report.converged = true;
      break;
    }
    last_cycle_start = beta / prec0;
    v.assign(1, z);
    scale(1.0 / beta, v[0]);
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    std::fill(h.begin(), h.end(), 0.0);

    int k = 0;
    for (; k < m && total_iters < cfg.max_iters; ++k) {
      std::vector<double> w = prec.apply(b.multiply(v[static_cast<std::size_t>(k)]));
      // modified Gram-Schmidt + one reorthogonalization pass
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i <= k; ++i) {
          const double c = dot(w, v[static_cast<std::size_t>(i)]);
          axpy(-c, v[static_cast<std::size_t>(i)], w);
          hij(i, k) += c;
        }
      }
      const double wnorm = norm2(w);
      hij(k + 1, k) = wnorm;
      ++total_iters;

      bool lucky = false;
      if (wnorm <= 1e-300) {
        lucky = true;  // invariant subspace: solution lies in the current space
      } else {
        v.push_back(w);
        scale(1.0 / wnorm, v.back());
      }

      // Givens rotations
      for (int i = 0; i < k; ++i) {
        const double t = cs[static_cast<std::size_t>(i)] * hij(i, k) + sn[static_cast<std::size_t>(i)] * hij(i + 1, k);
        hij(i + 1, k) = -sn[static_cast<std::size_t>(i)] * hij(i, k) + cs[static_cast<std::size_t>(i)] * hij(i + 1, k);
        hij(i, k) = t;
      }
      const double denom = std::hypot(hij(k, k), hij(k + 1, k));
      cs[static_cast<std::size_t>(k)] = denom == 0.0 ? 1.0 : hij(k, k) / denom;
      sn[static_cast<std::size_t>(k)] = denom == 0.0 ? 0.0 : hij(k + 1, k) / denom;
      hij(k, k) = denom;
      hij(k + 1, k) = 0.0;
      g[static_cast<std::size_t>(k) + 1] = -sn[static_cast<std::size_t>(k)] * g[static_cast<std::size_t>(k)];
      g[static_cast<std::size_t>(k)] = cs[static_cast<std::size_t>(k)] * g[static_cast<std::size_t>(k)];

      const double prec_res = std::abs(g[static_cast<std::size_t>(k) + 1]);
      report.prec_residuals.push_back(prec_res / prec0);

      // current iterate (needed for the true residual and observers)
      std::vector<double> u_k;
      if (cfg.track_true_residual || observer || prec_res / prec0 < cfg.epsilon || lucky || k + 1 == m ||
          total_iters >= cfg.max_iters) {
        std::vector<double> y(static_cast<std::size_t>(k) + 1);
        for (int i = k; i >= 0; --i) {
          double s = g[static_cast<std::size_t>(i)];
          for (int l = i + 1; l <= k; ++l) s -= hij(i, l) * y[static_cast<std::size_t>(l)];
          y[static_cast<std::size_t>(i)] = hij(i, i) != 0.0 ? s / hij(i, i) : 0.0;
        }
        u_k = u;
        for (int i = 0; i <= k; ++i) axpy(y[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(i)], u_k);
      }
      if (cfg.track_true_residual) report.true_residuals.push_back(norm2(residual(b, f, u_k)) / true0);
      if (observer) observer(total_iters, u_k);

      const bool hit = prec_res / prec0 < cfg.epsilon || lucky || total_iters >= cfg.max_iters;
      if (hit || k + 1 == m) u = std::move(u_k);  // exit or carry across the restart
      if (hit) {
        report.converged = prec_res / prec0 < cfg.epsilon;
        report.breakdown = lucky;
        done = report.converged || lucky || total_iters >= cfg.max_iters;
        if (done) break;
      }
    }
    if (!done) {
      ++report.restarts;
      // stagnation guard: less than 1% reduction over a full cycle
      const double now = report.prec_residuals.back();
      if (now > 0.99 * last_cycle_start) report.stagnated = true;
    }
  }

  report.iterations = static_cast<int>(report.prec_residuals.size()) - 1;
  report.achieved_reduction = report.prec_residuals.back();
  if (!report.converged && report.achieved_reduction < cfg.epsilon) report.converged = true;
  return {std::move(u), std::move(report)};
}

std::pair<std::vector<double>, SolveReport> richardson(const SparseMatrix& b, const Preconditioner& prec,
                                                       std::span<const double> f, const KrylovConfig& cfg,
                                                       std::span<const double> u0, const IterationObserver& observer) {
  const index_t n = b.rows();
  if (static_cast<index_t>(f.size()) != n) throw std::invalid_argument("richardson: rhs dimension mismatch");

  std::vector<double> u(u0.empty() ? std::vector<double>(static_cast<std::size_t>(n), 0.0)
                                   : std::vector<double>(u0.begin(), u0.end()));
  SolveReport report;
  report.coarse_dim = prec.coarse_dim();

  std::vector<double> r = residual(b, f, u);
  const double true0 = std::max(norm2(r), 1e-300);
  std::vector<double> z = prec.apply(r);
  const double prec0 = std::max(norm2(z), 1e-300);
  report.prec_residuals.push_back(1.0);
  if (cfg.track_true_residual) report.true_residuals.push_back(1.0);
  if (observer) observer(0, u);

  int grow_streak = 0;
  for (int k = 0; k < cfg.max_iters; ++k) {
    axpy(1.0, z, u);
    r = residual(b, f, u);
    z = prec.apply(r);
    const double rel = norm2(z) / prec0;
    report.prec_residuals.push_back(rel);
    if (cfg.track_true_residual) report.true_residuals.push_back(norm2(r) / true0);
    if (observer) observer(k + 1, u);

    if (rel < cfg.epsilon) {
      report.converged = true;
      break;
    }
    if (rel > report.prec_residuals[report.prec_residuals.size() - 2]) {
      if (++grow_streak >= 10) {
        report.diverged = true;
        break;
      }
    } else {
      grow_streak = 0;
    }
  }
  report.iterations = static_cast<int>(report.prec_residuals.size()) - 1;
  report.achieved_reduction = report.prec_residuals.back();
  return {std::move(u), std::move(report)};
}

}  // namespace msras
