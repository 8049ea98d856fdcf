#include <doctest.h>

#include <random>

#include "msras/pencil.hpp"
#include "support/models.hpp"
#include "support/oracles.hpp"

using namespace msras;
namespace mt = msras::testing;

namespace {

struct Setup {
  DiscreteSystem system;
  Decomposition decomp;
};

Setup ccfv_setup(index_t n, index_t px, index_t py, const mt::ModelOptions& opt, LayerConfig layers) {
  Setup s{assemble_ccfv(mt::make_model(n, n, opt)), {}};
  const DofGraph adj = cell_adjacency(*s.system.grid);
  s.decomp = make_decomposition(adj, partition_structured(*s.system.grid, px, py), layers, PuMode::Ramp, 1);
  return s;
}

}  // namespace

TEST_CASE("pencil blocks: exact symmetry and PSD right-hand side") {
  mt::ModelOptions opt;
  opt.velocity = velocity_constant();
  opt.diffusion = 1.0;
  const Setup s = ccfv_setup(12, 2, 2, opt, LayerConfig{1, 1});
  const EigenPencil p = assemble_pencil(s.system, s.decomp, 0);

  CHECK(asymmetry(p.K) == 0.0);
  CHECK(asymmetry(p.Mw) == 0.0);
  CHECK(p.K.rows() == p.n_primal + p.n_constraint);

  std::mt19937_64 rng(59);
  for (int t = 0; t < 50; ++t) {
    const auto x = mt::random_vector(static_cast<std::size_t>(p.Mw.rows()), rng);
    CHECK(dot(x, p.Mw.multiply(x)) >= 0.0);
  }
  // A_chi vanishes where the PU does
  for (index_t i = 0; i < p.n_primal; ++i)
    if (p.pu_on_os[static_cast<std::size_t>(i)] == 0.0)
      for (double v : p.Mw.row_values(i)) CHECK(v == 0.0);
}

TEST_CASE("constraint test set excludes the artificial boundary layer") {
  mt::ModelOptions opt;
  const Setup s = ccfv_setup(8, 2, 2, opt, LayerConfig{1, 1});
  const EigenPencil p = assemble_pencil(s.system, s.decomp, 0);

  // expected sets recomputed from the definition: constraint cells are the
  // oversample cells all of whose face neighbors lie inside the oversample
  const Grid& g = *s.system.grid;
  const auto& os_cells = s.decomp.oversample_cells[0];
  std::vector<char> in_os(static_cast<std::size_t>(g.cell_count()), 0);
  for (index_t c : os_cells) in_os[c] = 1;
  index_t n_constraint = 0;
  for (index_t c : os_cells) {
    bool interior = true;
    for (index_t nb : g.neighbors(c)) interior = interior && in_os[nb];
    if (interior) ++n_constraint;
  }
  CHECK(p.n_primal == static_cast<index_t>(os_cells.size()));
  CHECK(p.n_constraint == n_constraint);
  CHECK(p.n_constraint < p.n_primal);
  CHECK(p.n_constraint > 0);

  // constraint rows annihilate every discrete-harmonic direction by
  // construction: check them against the corresponding global operator rows
  const auto& os = p.os_dofs;
  const SparseMatrix sub = submatrix(s.system.B, os, os);
  for (std::size_t l = 0; l < p.constraint_local.size(); ++l) {
    const index_t li = p.constraint_local[l];
    CHECK(mt::to_dense(p.constraint).row(static_cast<Eigen::Index>(l)) ==
          mt::to_dense(sub).row(static_cast<Eigen::Index>(li)));
  }
}

TEST_CASE("empty constraint set is rejected") {
  // a one-cell-wide interior strip: every cell touches the artificial
  // boundary above or below
  mt::ModelOptions opt;
  const DiscreteSystem sys = assemble_ccfv(mt::make_model(6, 6, opt));
  const Grid& g = *sys.grid;
  Decomposition d;
  d.dofs_per_cell = 1;
  d.layers = LayerConfig{1, 0};
  std::vector<index_t> strip;
  for (index_t ix = 1; ix <= 4; ++ix) strip.push_back(g.cell_index(ix, 3));
  d.core_cells = {strip};
  d.overlap_cells = {strip};
  d.oversample_cells = {strip};
  d.overlap_dofs = {strip};
  d.oversample_dofs = {strip};
  d.pu = {std::vector<double>(strip.size(), 1.0)};
  CHECK_THROWS_WITH_AS(static_cast<void>(assemble_pencil(sys, d, 0)), doctest::Contains("empty constraint"),
                       std::invalid_argument);
}

TEST_CASE("constant kernel detection") {
  mt::ModelOptions opt;
  opt.velocity = velocity_constant();

  // interior oversampling domain, divergence-free velocity: kernel present
  {
    const Setup s = ccfv_setup(20, 5, 5, opt, LayerConfig{2, 2});
    const EigenPencil p = assemble_pencil(s.system, s.decomp, 12);  // center subdomain
    CHECK(p.constant_kernel);
    std::vector<double> ones(static_cast<std::size_t>(p.n_primal), 1.0);
    CHECK(norm_inf(p.a_local.multiply(ones)) <= 1e-12 * p.a_local.max_abs());
    CHECK(norm_inf(p.constraint.multiply(ones)) <= 1e-12 * p.constraint.max_abs());
  }
  // oversampling domain touching the Dirichlet boundary: no kernel
  {
    const Setup s = ccfv_setup(20, 5, 5, opt, LayerConfig{2, 2});
    const EigenPencil p = assemble_pencil(s.system, s.decomp, 0);
    CHECK_FALSE(p.constant_kernel);
  }
}

TEST_CASE("direct and saddle-point formulations agree (dense oracles)") {
  // Small 2D subdomain: the nonzero eigenvalues of the full saddle-point
  // pencil (QZ) match the generalized eigenproblem on an explicitly built
  // harmonic basis.
  mt::ModelOptions opt;
  opt.velocity = velocity_constant();
  BoundarySpec bc;
  bc.left = bc.bottom = BoundaryTag::Dirichlet;
  bc.right = bc.top = BoundaryTag::Outflow;
  opt.boundary = bc;
  const Setup s = ccfv_setup(8, 2, 2, opt, LayerConfig{1, 1});
  const EigenPencil p = assemble_pencil(s.system, s.decomp, 0);

  int inf_qz = 0, inf_hb = 0;
  const auto qz = mt::dense_pencil_eigenvalues(p.K, p.Mw, &inf_qz);
  const auto hb = mt::harmonic_basis_eigenvalues(p, &inf_hb);
  CHECK(inf_qz == inf_hb);

  // compare all appreciably nonzero eigenvalues
  std::size_t n_compare = 0;
  while (n_compare < hb.size() && hb[n_compare] > 1e-10 * hb.front()) ++n_compare;
  REQUIRE(qz.size() >= n_compare);
  for (std::size_t k = 0; k < n_compare; ++k)
    CHECK(qz[k] == doctest::Approx(hb[k]).epsilon(1e-10));
}

TEST_CASE("1D strip pencil against the harmonic-basis oracle") {
  mt::ModelOptions opt;
  opt.velocity = [](double, double) { return Vec2{1.0, 0.0}; };
  opt.diffusion = 0.5;
  Model m;
  m.grid = std::make_shared<Grid>(20, 1, std::array<double, 4>{0, 1, 0, 1}, BoundarySpec::all_dirichlet());
  auto prob = std::make_shared<ProblemSpec>();
  prob->diffusion.assign(20, 0.5);
  prob->eig_diffusion = prob->diffusion;
  prob->velocity = opt.velocity;
  prob->source = [](double, double) { return 0.0; };
  prob->dirichlet = [](double, double) { return 0.0; };
  prob->outflow = [](double, double) { return 0.0; };
  m.problem = prob;
  const DiscreteSystem sys = assemble_ccfv(m);
  const DofGraph adj = cell_adjacency(*sys.grid);
  const Decomposition d =
      make_decomposition(adj, partition_structured(*sys.grid, 2, 1), LayerConfig{2, 2}, PuMode::Ramp, 1);
  const EigenPencil p = assemble_pencil(sys, d, 0);

  const auto qz = mt::dense_pencil_eigenvalues(p.K, p.Mw);
  const auto hb = mt::harmonic_basis_eigenvalues(p);
  std::size_t n_compare = 0;
  while (n_compare < hb.size() && hb[n_compare] > 1e-10 * hb.front()) ++n_compare;
  REQUIRE(n_compare >= 1);
  for (std::size_t k = 0; k < n_compare; ++k) CHECK(qz[k] == doctest::Approx(hb[k]).epsilon(1e-10));
}
