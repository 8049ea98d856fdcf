#include <doctest.h>

#include <cmath>
#include <random>

#include "msras/assembly.hpp"
#include "msras/factorization.hpp"
#include "support/models.hpp"
#include "support/oracles.hpp"

using namespace msras;
namespace mt = msras::testing;

TEST_CASE("two-cell strip coupling") {
  // A = 1, b = 0, h = 1 (extents scaled so cells are unit squares)
  mt::ModelOptions opt;
  Model m;
  m.grid = std::make_shared<Grid>(2, 1, std::array<double, 4>{0, 2, 0, 1}, BoundarySpec::all_dirichlet());
  auto prob = std::make_shared<ProblemSpec>();
  prob->diffusion = {1.0, 1.0};
  prob->eig_diffusion = prob->diffusion;
  prob->velocity = [](double, double) { return Vec2{0, 0}; };
  prob->source = [](double, double) { return 0.0; };
  prob->dirichlet = [](double, double) { return 0.0; };
  prob->outflow = [](double, double) { return 0.0; };
  m.problem = prob;
  const DiscreteSystem sys = assemble_ccfv(m);
  CHECK(sys.B.coeff(0, 1) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(sys.B.coeff(1, 0) == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("harmonic transmissibility under contrast") {
  Model m;
  m.grid = std::make_shared<Grid>(2, 1, std::array<double, 4>{0, 2, 0, 1}, BoundarySpec::all_dirichlet());
  auto prob = std::make_shared<ProblemSpec>();
  prob->diffusion = {1.0, 1e-6};
  prob->eig_diffusion = prob->diffusion;
  prob->velocity = [](double, double) { return Vec2{0, 0}; };
  prob->source = [](double, double) { return 0.0; };
  prob->dirichlet = [](double, double) { return 0.0; };
  prob->outflow = [](double, double) { return 0.0; };
  m.problem = prob;
  const DiscreteSystem sys = assemble_ccfv(m);
  const double expected = 2.0 / (1.0 / 1.0 + 1.0 / 1e-6);  // |gamma| = h = 1
  CHECK(sys.B.coeff(0, 1) == doctest::Approx(-expected).epsilon(1e-12));
}

TEST_CASE("upwind exactness on constants") {
  mt::ModelOptions opt;
  opt.diffusion = 0.0;
  opt.eig_diffusion = 1e-6;
  opt.velocity = [](double, double) { return Vec2{1.0, 0.0}; };
  opt.dirichlet = [](double, double) { return 1.0; };
  BoundarySpec bc;
  bc.left = BoundaryTag::Dirichlet;
  bc.right = BoundaryTag::Outflow;
  bc.bottom = bc.top = BoundaryTag::Outflow;
  opt.boundary = bc;
  const DiscreteSystem sys = assemble_ccfv(mt::make_model(8, 3, opt));
  const Factorization lu(sys.B);
  const auto u = lu.solve(sys.F);
  for (double v : u) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("flux balance on interior rows") {
  mt::ModelOptions opt;
  opt.velocity = velocity_constant();
  const DiscreteSystem sys = assemble_ccfv(mt::make_model(9, 9, opt));
  const Grid& g = *sys.grid;
  std::vector<double> ones(static_cast<std::size_t>(sys.n_dofs()), 1.0);
  const auto row_sums = sys.B.multiply(ones);
  for (index_t c = 0; c < g.cell_count(); ++c) {
    const index_t ix = g.cell_ix(c), iy = g.cell_iy(c);
    const bool interior = ix > 0 && iy > 0 && ix + 1 < g.nx() && iy + 1 < g.ny();
    if (interior) CHECK(std::abs(row_sums[c]) <= 1e-12 * sys.B.norm_inf());
  }
}

TEST_CASE("ccfv pure diffusion is symmetric and matches A_a") {
  const DiscreteSystem sys = assemble_ccfv(mt::make_model(7, 5));
  CHECK(asymmetry(sys.B) == 0.0);
  CHECK(add(sys.B, sys.A_a, 1.0, -1.0).max_abs() == 0.0);
  std::mt19937_64 rng(43);
  for (int t = 0; t < 20; ++t) {
    const auto x = mt::random_vector(static_cast<std::size_t>(sys.n_dofs()), rng);
    CHECK(dot(x, sys.A_a.multiply(x)) >= 0.0);
  }
}

TEST_CASE("ccfv local a-form drops artificial-boundary terms") {
  const DiscreteSystem sys = assemble_ccfv(mt::make_model(6, 6));
  const std::vector<index_t> cells{14, 15, 20, 21};
  const SparseMatrix local = sys.local_aform(cells);
  std::vector<double> ones(4, 1.0);
  CHECK(norm_inf(local.multiply(ones)) == 0.0);  // interior block: constants a-null
  const SparseMatrix sub = submatrix(sys.A_a, cells, cells);
  CHECK(norm_inf(sub.multiply(ones)) > 0.0);  // zero extension keeps crossing terms
}
