#pragma once

#include <iosfwd>
#include <string>

#include "msras/sparse.hpp"

namespace msras {

/// Matrix-market coordinate I/O (ASCII, 1-based indices). `symmetric` writes
/// only the lower triangle with the symmetric qualifier; reading expands it.
void write_matrix_market(std::ostream& out, const SparseMatrix& a, bool symmetric = false);
void write_matrix_market(const std::string& path, const SparseMatrix& a, bool symmetric = false);

SparseMatrix read_matrix_market(std::istream& in);
SparseMatrix read_matrix_market(const std::string& path);

}  // namespace msras
