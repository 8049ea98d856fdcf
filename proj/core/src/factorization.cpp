#include "msras/factorization.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cctype>
#include <random>

namespace msras {

namespace {

using EigenSparse = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

EigenSparse to_eigen(const SparseMatrix& a) {
  std::vector<Eigen::Triplet<double, int>> trip;
  trip.reserve(static_cast<std::size_t>(a.nnz()));
  for (index_t r = 0; r < a.rows(); ++r) {
    auto rc = a.row_cols(r);
    auto rv = a.row_values(r);
    for (std::size_t k = 0; k < rc.size(); ++k)
      trip.emplace_back(static_cast<int>(r), static_cast<int>(rc[k]), rv[k]);
  }
  EigenSparse m(static_cast<int>(a.rows()), static_cast<int>(a.cols()));
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  return m;
}

index_t parse_trailing_index(const std::string& msg) {
  // Backend singularity messages end with the failing column, e.g.
  // "... ZERO COLUMN AT 2". 1-based in the message.
  index_t value = -1;
  std::size_t end = msg.size();
  while (end > 0 && std::isspace(static_cast<unsigned char>(msg[end - 1]))) --end;
  std::size_t begin = end;
  while (begin > 0 && std::isdigit(static_cast<unsigned char>(msg[begin - 1]))) --begin;
  if (begin < end) value = std::stoll(msg.substr(begin, end - begin)) - 1;
  return value;
}

}  // namespace

struct Factorization::Impl {
  Eigen::SparseLU<EigenSparse, Eigen::COLAMDOrdering<int>> lu;
  SparseMatrix a;  // kept for iterative refinement and verification
};

Factorization::Factorization(const SparseMatrix& a) : impl_(std::make_unique<Impl>()), dim_(a.rows()) {
  if (a.rows() != a.cols()) throw std::invalid_argument("factorize: matrix not square");
  impl_->a = a;
  EigenSparse m = to_eigen(a);
  impl_->lu.isSymmetric(false);
  impl_->lu.setPivotThreshold(0.1);
  impl_->lu.analyzePattern(m);
  impl_->lu.factorize(m);
  if (impl_->lu.info() != Eigen::Success) {
    const std::string msg = impl_->lu.lastErrorMessage();
    throw SingularMatrixError("factorize: " + msg, parse_trailing_index(msg));
  }
}

Factorization::Factorization(Factorization&&) noexcept = default;
Factorization& Factorization::operator=(Factorization&&) noexcept = default;
Factorization::~Factorization() = default;

void Factorization::solve(std::span<const double> b, std::span<double> x) const {
  if (static_cast<index_t>(b.size()) != dim_ || static_cast<index_t>(x.size()) != dim_)
    throw std::invalid_argument("Factorization::solve: dimension mismatch");
  Eigen::Map<const Eigen::VectorXd> bm(b.data(), static_cast<Eigen::Index>(b.size()));
  Eigen::VectorXd xv = impl_->lu.solve(bm);

  // One step of iterative refinement when the residual is not already tiny.
  std::vector<double> xs(xv.data(), xv.data() + xv.size());
  std::vector<double> r = impl_->a.multiply(xs);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  const double bnorm = norm2(b);
  if (norm2(r) > 1e-10 * bnorm && bnorm > 0.0) {
    Eigen::Map<const Eigen::VectorXd> rm(r.data(), static_cast<Eigen::Index>(r.size()));
    Eigen::VectorXd dx = impl_->lu.solve(rm);
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] += dx[static_cast<Eigen::Index>(i)];
  }
  std::copy(xs.begin(), xs.end(), x.begin());
}

std::vector<double> Factorization::solve(std::span<const double> b) const {
  std::vector<double> x(static_cast<std::size_t>(dim_));
  solve(b, x);
  return x;
}

bool Factorization::verify(int n_probes, double tol, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const double anorm = impl_->a.norm_inf();
  for (int p = 0; p < n_probes; ++p) {
    std::vector<double> v(static_cast<std::size_t>(dim_));
    for (double& e : v) e = dist(rng);
    std::vector<double> b = impl_->a.multiply(v);
    std::vector<double> x = solve(b);
    std::vector<double> ax = impl_->a.multiply(x);
    double err = 0.0;
    for (std::size_t i = 0; i < ax.size(); ++i) err = std::max(err, std::abs(ax[i] - b[i]));
    if (err > tol * std::max(1.0, anorm * norm_inf(v))) return false;
  }
  return true;
}

}  // namespace msras
