#include <doctest.h>

#include <cmath>
#include <random>

#include "msras/problem.hpp"

using namespace msras;

TEST_CASE("checkerboard_diffusion parity and tiling") {
  const Grid g2(2, 2, {0, 1, 0, 1}, BoundarySpec::all_dirichlet());
  const double eps = 1e-6;
  const auto a = checkerboard_diffusion(g2, 2, 2, eps, 1.0);
  CHECK(a == std::vector<double>{1.0, eps, eps, 1.0});

  const Grid g(1000, 1000, {0, 1, 0, 1}, BoundarySpec::all_dirichlet());
  const auto field = checkerboard_diffusion(g, 8, 8, 1e-6, 1.0);
  double lo = 1e300, hi = 0;
  index_t n_lo = 0, n_hi = 0;
  for (double v : field) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    (v == 1e-6 ? n_lo : n_hi)++;
  }
  CHECK(lo == 1e-6);
  CHECK(hi == 1.0);
  CHECK(n_lo == n_hi);  // even tile counts split the parity classes evenly
  // corner tile (0,0) is a_hi
  CHECK(field[0] == 1.0);

  CHECK_THROWS(checkerboard_diffusion(g, 3, 8, 1e-6, 1.0));
}

TEST_CASE("velocity_constant") {
  const VectorField b = velocity_constant();
  const Vec2 v = b(0.5, 0.5);
  CHECK(v.x == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(v.y == 1.0);

  // divergence by central differences
  const double h = 1e-4;
  const double div = (b(0.5 + h, 0.5).x - b(0.5 - h, 0.5).x) / (2 * h) + (b(0.5, 0.5 + h).y - b(0.5, 0.5 - h).y) / (2 * h);
  CHECK(std::abs(div) < 1e-10);

  CHECK(std::hypot(v.x, v.y) == doctest::Approx(std::sqrt(13.0) / 3.0).epsilon(1e-14));
}

TEST_CASE("velocity_rotating") {
  const VectorField b = velocity_rotating();
  CHECK(b(0.5, 0.5).x == 0.0);
  CHECK(b(0.5, 0.5).y == 0.0);

  // hand evaluation at (1, 0.5)
  CHECK(b(1.0, 0.5).x == doctest::Approx(-0.75).epsilon(1e-14));
  CHECK(b(1.0, 0.5).y == doctest::Approx(10.0).epsilon(1e-14));

  // analytic divergence: d1b1 = d2b2 = -40 u v - 3/2 with u = x1 - 1/2,
  // v = x2 - 1/2, so div b = -80 u v - 3; cross-checked by central differences
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(0.05, 0.95);
  for (int t = 0; t < 25; ++t) {
    const double x = dist(rng), y = dist(rng);
    const double u = x - 0.5, v = y - 0.5;
    const double div_exact = -80.0 * u * v - 3.0;
    const double h = 1e-5;
    const double div_fd = (b(x + h, y).x - b(x - h, y).x) / (2 * h) + (b(x, y + h).y - b(x, y - h).y) / (2 * h);
    CHECK(std::abs(div_fd - div_exact) < 1e-6);
  }

  // point symmetry b(x) = -b((1,1) - x)
  for (int t = 0; t < 100; ++t) {
    const double x = dist(rng), y = dist(rng);
    const Vec2 v1 = b(x, y), v2 = b(1.0 - x, 1.0 - y);
    CHECK(std::abs(v1.x + v2.x) <= 1e-12);
    CHECK(std::abs(v1.y + v2.y) <= 1e-12);
  }
}

TEST_CASE("gaussian_source") {
  const ScalarField f = gaussian_source();
  CHECK(f(0.25, 0.5) == 1.0);
  CHECK(f(0.35, 0.5) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(f(1.0, 1.0) < 1e-24);
}

TEST_CASE("peclet") {
  CoefficientStats s;
  s.a_min = 1e-6;
  s.b_inf = 0.0;
  CHECK(peclet(s, 1.0) == 0.0);

  s.b_inf = std::sqrt(13.0) / 3.0;
  CHECK(peclet(s, 1e-3) == doctest::Approx(1201.85).epsilon(1e-4));

  s.a_min = 0.0;
  CHECK(std::isinf(peclet(s, 1e-3)));

  s.a_min = 1e-6;
  CHECK_THROWS(peclet(s, -1.0));

  // homogeneity in the length scale
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(0.1, 10.0);
  for (int t = 0; t < 20; ++t) {
    const double len = dist(rng), c = dist(rng);
    CHECK(peclet(s, c * len) == doctest::Approx(c * peclet(s, len)).epsilon(1e-13));
  }
}

TEST_CASE("model_catalogue") {
  {
    ModelParams p;
    p.grid_n = 40;  // desk-scale override of the 1000^2 default
    const Model m = model_catalogue(ModelName::Checkerboard51, p);
    CHECK(m.grid->nx() == 40);
    const Vec2 b = m.problem->velocity(0.3, 0.7);
    CHECK(b.x == doctest::Approx(2.0 / 3.0));
    CHECK(m.problem->source(0.4, 0.4) == 0.0);
    CHECK(m.problem->dirichlet(0.0, 0.5) == 1.0);
    CHECK(m.problem->dirichlet(0.5, 0.0) == 0.0);
    int outflow = 0;
    for (const BoundaryFace& f : m.grid->boundary_faces())
      if (f.tag == BoundaryTag::Outflow) {
        ++outflow;
        CHECK((f.side == Side::Right || f.side == Side::Top));
      }
    CHECK(outflow == 80);
  }
  {
    const Model m = model_catalogue(ModelName::Checkerboard51);
    CHECK(m.grid->nx() == 1000);  // paper-scale default
    CHECK(m.grid->hx() == doctest::Approx(1e-3));
  }
  {
    ModelParams p;
    p.a_min = 0.0;
    p.grid_n = 30;
    const Model m = model_catalogue(ModelName::Transport54, p);
    CHECK(m.problem->diffusion_of(7) == 0.0);
    CHECK(m.problem->eig_diffusion_of(7) == 1e-6);  // surrogate inner product
    const Model def = model_catalogue(ModelName::Transport54);
    CHECK(def.grid->nx() == 600);
  }
  {
    ModelParams p;
    p.grid_n = 512;
    p.tiles = 32;
    p.a_min = 1e-6;
    const Model m = model_catalogue(ModelName::Rotating52, p);
    CHECK(m.grid->nx() == 512);
    for (const BoundaryFace& f : m.grid->boundary_faces()) CHECK(f.tag == BoundaryTag::Dirichlet);
    CHECK(m.problem->source(0.25, 0.5) == 1.0);
  }
  CHECK_THROWS(parse_model_name("nonexistent"));
}

TEST_CASE("coefficient_stats samples corners") {
  const Grid g(4, 4, {0, 1, 0, 1}, BoundarySpec::all_dirichlet());
  ProblemSpec prob;
  prob.diffusion.assign(16, 2.0);
  prob.diffusion[3] = 0.5;
  prob.eig_diffusion = prob.diffusion;
  prob.velocity = velocity_rotating();
  const CoefficientStats s = coefficient_stats(g, prob);
  CHECK(s.a_min == 0.5);
  CHECK(s.a_max == 2.0);
  // rotating field peaks at the domain corners (sampled as cell corners)
  const Vec2 corner = prob.velocity(1.0, 1.0);
  CHECK(s.b_inf >= std::hypot(corner.x, corner.y) - 1e-12);
}
