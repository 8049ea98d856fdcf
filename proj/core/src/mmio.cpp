#include "msras/mmio.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace msras {

void write_matrix_market(std::ostream& out, const SparseMatrix& a, bool symmetric) {
  out << "%%MatrixMarket matrix coordinate real " << (symmetric ? "symmetric" : "general") << "\n";
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(a.nnz()));
  for (index_t r = 0; r < a.rows(); ++r) {
    auto rc = a.row_cols(r);
    auto rv = a.row_values(r);
    for (std::size_t k = 0; k < rc.size(); ++k) {
      if (symmetric && rc[k] > r) continue;
      entries.push_back({r, rc[k], rv[k]});
    }
  }
  out << a.rows() << " " << a.cols() << " " << entries.size() << "\n";
  char buf[96];
  for (const Triplet& t : entries) {
    std::snprintf(buf, sizeof buf, "%lld %lld %.17g\n", static_cast<long long>(t.row + 1), static_cast<long long>(t.col + 1), t.value);
    out << buf;
  }
}

void write_matrix_market(const std::string& path, const SparseMatrix& a, bool symmetric) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_matrix_market: cannot open " + path);
  write_matrix_market(f, a, symmetric);
  if (!f) throw std::runtime_error("write_matrix_market: write failed for " + path);
}

SparseMatrix read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_matrix_market: empty stream");
  std::istringstream header(line);
  std::string banner, object, format, field, kind;
  header >> banner >> object >> format >> field >> kind;
  if (banner != "%%MatrixMarket" || object != "matrix" || format != "coordinate")
    throw std::runtime_error("read_matrix_market: unsupported header '" + line + "'");
  if (field != "real" && field != "integer")
    throw std::runtime_error("read_matrix_market: unsupported field type '" + field + "'");
  const bool symmetric = kind == "symmetric";
  if (!symmetric && kind != "general")
    throw std::runtime_error("read_matrix_market: unsupported symmetry '" + kind + "'");

  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream sizes(line);
  long long nrows = 0, ncols = 0, nnz = 0;
  if (!(sizes >> nrows >> ncols >> nnz)) throw std::runtime_error("read_matrix_market: bad size line");

  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(symmetric ? 2 * nnz : nnz));
  for (long long k = 0; k < nnz; ++k) {
    long long r = 0, c = 0;
    double v = 0.0;
    if (!(in >> r >> c >> v)) throw std::runtime_error("read_matrix_market: truncated entry list");
    trip.push_back({r - 1, c - 1, v});
    if (symmetric && r != c) trip.push_back({c - 1, r - 1, v});
  }
  return SparseMatrix::from_triplets(nrows, ncols, std::move(trip));
}

SparseMatrix read_matrix_market(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_matrix_market: cannot open " + path);
  return read_matrix_market(f);
}

}  // namespace msras
