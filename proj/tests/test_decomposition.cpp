#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "msras/decomposition.hpp"
#include "support/oracles.hpp"

using namespace msras;
namespace mt = msras::testing;

namespace {

Grid unit_grid(index_t nx, index_t ny) { return Grid(nx, ny, {0, 1, 0, 1}, BoundarySpec::all_dirichlet()); }

}  // namespace

TEST_CASE("partition_structured") {
  const Grid g = unit_grid(4, 4);
  const auto cores = partition_structured(g, 2, 2);
  REQUIRE(cores.size() == 4);
  for (const auto& c : cores) CHECK(c.size() == 4);
  CHECK(cores[0] == std::vector<index_t>{0, 1, 4, 5});
  CHECK(cores[3] == std::vector<index_t>{10, 11, 14, 15});

  CHECK_THROWS(partition_structured(unit_grid(10, 10), 3, 2));

  const Grid big = unit_grid(1000, 1000);
  const auto blocks = partition_structured(big, 10, 10);
  CHECK(blocks.size() == 100);
  for (const auto& b : blocks) CHECK(b.size() == 10000);
}

TEST_CASE("partition_greedy") {
  {
    const DofGraph g = cell_adjacency(unit_grid(5, 3));
    const auto cores = partition_greedy(g, 1, 42);
    REQUIRE(cores.size() == 1);
    CHECK(cores[0].size() == 15);
  }
  {
    const DofGraph g = cell_adjacency(Grid(20, 2, {0, 10, 0, 1}, BoundarySpec::all_dirichlet()));
    const auto cores = partition_greedy(g, 2, 42);
    CHECK(std::abs(static_cast<long long>(cores[0].size()) - static_cast<long long>(cores[1].size())) <= 1);
  }
  {
    const DofGraph g = cell_adjacency(unit_grid(512, 512));
    const auto cores = partition_greedy(g, 64, 42);
    std::size_t lo = SIZE_MAX, hi = 0;
    for (const auto& c : cores) {
      lo = std::min(lo, c.size());
      hi = std::max(hi, c.size());
    }
    CHECK(static_cast<double>(hi) / static_cast<double>(lo) <= 1.1);

    const auto again = partition_greedy(g, 64, 42);
    CHECK(cores == again);  // deterministic for a fixed seed
  }
  CHECK_THROWS(partition_greedy(cell_adjacency(unit_grid(2, 2)), 0, 1));
  CHECK_THROWS(partition_greedy(cell_adjacency(unit_grid(2, 2)), 5, 1));
}

TEST_CASE("extend_layers") {
  const DofGraph g = cell_adjacency(unit_grid(5, 5));
  const std::vector<index_t> center{12};
  const auto plus = extend_layers(center, g, 1);
  CHECK(plus == std::vector<index_t>{7, 11, 12, 13, 17});
  CHECK(extend_layers(center, g, 0) == center);
  CHECK(extend_layers(center, g, 8).size() == 25);
}

TEST_CASE("ramp PU on a 1D strip") {
  // adjacent cores, 1 overlap layer each: the weight ramp across the band is
  // (1, 2/3, 1/3) with the partner mirrored
  const Grid g(8, 1, {0, 8, 0, 1}, BoundarySpec::all_dirichlet());
  const DofGraph adj = cell_adjacency(g);
  std::vector<std::vector<index_t>> cores{{0, 1, 2, 3}, {4, 5, 6, 7}};
  const Decomposition d = make_decomposition(adj, cores, LayerConfig{1, 0}, PuMode::Ramp, 1);

  REQUIRE(d.overlap_cells[0] == std::vector<index_t>{0, 1, 2, 3, 4});
  REQUIRE(d.overlap_cells[1] == std::vector<index_t>{3, 4, 5, 6, 7});
  // subdomain 0 across cells 2, 3, 4
  CHECK(d.pu[0][2] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(d.pu[0][3] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(d.pu[0][4] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  // mirrored partner across cells 3, 4, 5
  CHECK(d.pu[1][0] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(d.pu[1][1] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(d.pu[1][2] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("multiplicity PU shares cells evenly") {
  const Grid g(4, 1, {0, 4, 0, 1}, BoundarySpec::all_dirichlet());
  const DofGraph adj = cell_adjacency(g);
  std::vector<std::vector<index_t>> cores{{0, 1}, {2, 3}};
  const Decomposition d = make_decomposition(adj, cores, LayerConfig{1, 0}, PuMode::Multiplicity, 1);
  // cells 1 and 2 are shared by both overlaps
  CHECK(d.pu[0][0] == 1.0);  // cell 0
  CHECK(d.pu[0][1] == 0.5);  // cell 1
  CHECK(d.pu[0][2] == 0.5);  // cell 2
}

TEST_CASE("interior core cells carry weight one") {
  const Grid g = unit_grid(12, 12);
  const DofGraph adj = cell_adjacency(g);
  const Decomposition d = make_decomposition(adj, partition_structured(g, 2, 2), LayerConfig{2, 2}, PuMode::Ramp, 4);
  // center cell of core 0 (block [0,6)x[0,6)): cell (2,2)
  const index_t cell = g.cell_index(2, 2);
  const auto& cells = d.overlap_cells[0];
  const std::size_t k = static_cast<std::size_t>(std::lower_bound(cells.begin(), cells.end(), cell) - cells.begin());
  CHECK(d.pu[0][4 * k] == 1.0);
}

TEST_CASE("partition of unity identity") {
  const Grid g = unit_grid(20, 20);
  const DofGraph adj = cell_adjacency(g);
  for (PuMode mode : {PuMode::Ramp, PuMode::Multiplicity}) {
    const Decomposition d = make_decomposition(adj, partition_structured(g, 4, 4), LayerConfig{2, 2}, mode, 4);
    std::mt19937_64 rng(47);
    for (int t = 0; t < 20; ++t) {
      const auto x = mt::random_vector(static_cast<std::size_t>(g.cell_count()) * 4, rng);
      std::vector<double> sum(x.size(), 0.0);
      for (int j = 0; j < d.size(); ++j)
        prolong_add(d.overlap_dofs[static_cast<std::size_t>(j)], d.pu[static_cast<std::size_t>(j)],
                    restriction_apply(d.overlap_dofs[static_cast<std::size_t>(j)], x), sum);
      double err = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) err = std::max(err, std::abs(sum[i] - x[i]));
      CHECK(err <= 1e-13 * norm_inf(x));
    }
  }
}

TEST_CASE("uncovered cell is a hard error") {
  const Grid g(4, 1, {0, 4, 0, 1}, BoundarySpec::all_dirichlet());
  const DofGraph adj = cell_adjacency(g);
  Decomposition d;
  d.dofs_per_cell = 1;
  d.layers = LayerConfig{1, 0};
  d.core_cells = {{0, 1}, {2, 3}};
  d.overlap_cells = {{0, 1}, {2, 3}};  // leaves no shared coverage; fine
  CHECK_NOTHROW(build_pu(d, adj, PuMode::Ramp));
  d.overlap_cells = {{0, 1}, {3}};  // cell 2 uncovered
  CHECK_THROWS(build_pu(d, adj, PuMode::Ramp));
}

TEST_CASE("oversampling nests the overlap") {
  const Grid g = unit_grid(16, 16);
  const DofGraph adj = cell_adjacency(g);
  const Decomposition d = make_decomposition(adj, partition_structured(g, 4, 4), LayerConfig{2, 2}, PuMode::Ramp, 4);
  for (int j = 0; j < d.size(); ++j) {
    const auto& ov = d.overlap_dofs[static_cast<std::size_t>(j)];
    const auto& os = d.oversample_dofs[static_cast<std::size_t>(j)];
    CHECK(std::includes(os.begin(), os.end(), ov.begin(), ov.end()));
  }
}

TEST_CASE("oversampling adds exactly ell layers") {
  const Grid g = unit_grid(40, 40);
  const DofGraph adj = cell_adjacency(g);
  const int ell = 2;
  const Decomposition d = make_decomposition(adj, partition_structured(g, 4, 4), LayerConfig{2, ell}, PuMode::Ramp, 4);
  for (int j = 0; j < d.size(); ++j) {
    const auto grown = extend_layers(d.overlap_cells[static_cast<std::size_t>(j)], adj, ell);
    CHECK(grown == d.oversample_cells[static_cast<std::size_t>(j)]);
    // and one more layer would add cells unless the domain is exhausted
    const auto more = extend_layers(d.oversample_cells[static_cast<std::size_t>(j)], adj, 1);
    if (d.oversample_cells[static_cast<std::size_t>(j)].size() < static_cast<std::size_t>(g.cell_count()))
      CHECK(more.size() > d.oversample_cells[static_cast<std::size_t>(j)].size());
  }
}

TEST_CASE("restriction and prolongation") {
  std::mt19937_64 rng(53);
  const auto x = mt::random_vector(30, rng);
  const std::vector<index_t> dofs{2, 5, 11, 17, 29};

  const auto local = restriction_apply(dofs, x);
  for (std::size_t k = 0; k < dofs.size(); ++k) CHECK(local[k] == x[dofs[k]]);

  // gather then scatter over disjoint sets reproduces the vector
  std::vector<double> out(30, 0.0);
  const std::vector<index_t> rest = [] {
    std::vector<index_t> r;
    for (index_t i = 0; i < 30; ++i)
      if (i != 2 && i != 5 && i != 11 && i != 17 && i != 29) r.push_back(i);
    return r;
  }();
  prolong_add(dofs, {}, restriction_apply(dofs, x), out);
  prolong_add(rest, {}, restriction_apply(rest, x), out);
  CHECK(out == x);

  // weighted scatter against a dense extension-by-zero operator
  const auto w = mt::random_vector(dofs.size(), rng);
  std::vector<double> lhs(30, 0.0);
  prolong_add(dofs, w, local, lhs);
  Eigen::MatrixXd r_t = Eigen::MatrixXd::Zero(30, static_cast<Eigen::Index>(dofs.size()));
  for (std::size_t k = 0; k < dofs.size(); ++k) r_t(dofs[k], static_cast<Eigen::Index>(k)) = w[k];
  const Eigen::VectorXd rhs = r_t * mt::to_eigen(local);
  for (index_t i = 0; i < 30; ++i) CHECK(lhs[static_cast<std::size_t>(i)] == doctest::Approx(rhs(i)).epsilon(1e-15));

  CHECK_THROWS(restriction_apply(std::vector<index_t>{40}, x));
}

TEST_CASE("decomposition dump is line oriented and deterministic") {
  const Grid g = unit_grid(6, 6);
  const DofGraph adj = cell_adjacency(g);
  const Decomposition d = make_decomposition(adj, partition_structured(g, 2, 2), LayerConfig{1, 1}, PuMode::Ramp, 1);
  std::ostringstream a, b;
  dump_decomposition(a, d);
  dump_decomposition(b, d);
  CHECK(a.str() == b.str());
  CHECK(a.str().find("0 core:") == 0);
  int lines = 0;
  for (char c : a.str())
    if (c == '\n') ++lines;
  CHECK(lines == 3 * d.size());
}
