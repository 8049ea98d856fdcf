#include "msras/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace msras {

std::vector<double> checkerboard_diffusion(const Grid& grid, index_t tiles_x, index_t tiles_y, double a_lo, double a_hi) {
  if (tiles_x < 1 || tiles_y < 1) throw std::invalid_argument("checkerboard_diffusion: tile counts must be >= 1");
  if (grid.nx() % tiles_x != 0 || grid.ny() % tiles_y != 0)
    throw std::invalid_argument("checkerboard_diffusion: tile counts must divide the grid dimensions");
  std::vector<double> a(static_cast<std::size_t>(grid.cell_count()));
  for (index_t cell = 0; cell < grid.cell_count(); ++cell) {
    const index_t tile_ix = grid.cell_ix(cell) * tiles_x / grid.nx();
    const index_t tile_iy = grid.cell_iy(cell) * tiles_y / grid.ny();
    a[static_cast<std::size_t>(cell)] = ((tile_ix + tile_iy) % 2 == 0) ? a_hi : a_lo;
  }
  return a;
}

VectorField velocity_constant() {
  return [](double, double) { return Vec2{2.0 / 3.0, 1.0}; };
}

VectorField velocity_rotating() {
  return [](double x1, double x2) {
    const double u = x1 - 0.5, v = x2 - 0.5;
    return Vec2{20.0 * v * (1.0 - u * u) - 1.5 * u, 20.0 * u * (1.0 - v * v) - 1.5 * v};
  };
}

ScalarField gaussian_source() {
  return [](double x1, double x2) {
    const double dx = x1 - 0.25, dy = x2 - 0.5;
    return std::exp(-(dx * dx + dy * dy) / 1e-2);
  };
}

CoefficientStats coefficient_stats(const Grid& grid, const ProblemSpec& prob) {
  CoefficientStats s;
  s.a_min = std::numeric_limits<double>::infinity();
  s.a_max = 0.0;
  for (double a : prob.diffusion) {
    s.a_min = std::min(s.a_min, a);
    s.a_max = std::max(s.a_max, a);
  }
  const double hx = grid.hx(), hy = grid.hy();
  for (index_t cell = 0; cell < grid.cell_count(); ++cell) {
    const Vec2 o = grid.cell_origin(cell);
    const Vec2 samples[5] = {{o.x + 0.5 * hx, o.y + 0.5 * hy}, {o.x, o.y}, {o.x + hx, o.y}, {o.x, o.y + hy}, {o.x + hx, o.y + hy}};
    for (const Vec2& p : samples) {
      const Vec2 b = prob.velocity(p.x, p.y);
      s.b_inf = std::max(s.b_inf, std::hypot(b.x, b.y));
    }
  }
  return s;
}

double peclet(const CoefficientStats& stats, double length) {
  if (length < 0.0) throw std::invalid_argument("peclet: negative length scale");
  if (stats.a_min == 0.0) return kPecletInfinity;
  return length * stats.b_inf / stats.a_min;
}

ModelName parse_model_name(const std::string& name) {
  if (name == "checkerboard51") return ModelName::Checkerboard51;
  if (name == "rotating52") return ModelName::Rotating52;
  if (name == "transport54") return ModelName::Transport54;
  throw std::invalid_argument("unknown model '" + name + "'");
}

namespace {

ScalarField zero_field() {
  return [](double, double) { return 0.0; };
}

/// g = 1 on the inflow side x = 0, g = 0 on y = 0.
ScalarField inflow_dirichlet() {
  return [](double x1, double) { return x1 == 0.0 ? 1.0 : 0.0; };
}

}  // namespace

Model model_catalogue(ModelName name, const ModelParams& params) {
  Model m;
  switch (name) {
    case ModelName::Checkerboard51: {
      const index_t n = params.grid_n > 0 ? params.grid_n : 1000;
      const index_t tiles = params.tiles > 0 ? params.tiles : 8;
      const double a_min = params.a_min >= 0.0 ? params.a_min : 1e-6;
      BoundarySpec bc;
      bc.left = bc.bottom = BoundaryTag::Dirichlet;
      bc.right = bc.top = BoundaryTag::Outflow;
      m.grid = std::make_shared<Grid>(n, n, std::array<double, 4>{0, 1, 0, 1}, bc);
      auto prob = std::make_shared<ProblemSpec>();
      prob->diffusion = checkerboard_diffusion(*m.grid, tiles, tiles, a_min, params.a_max);
      prob->eig_diffusion = prob->diffusion;
      prob->velocity = velocity_constant();
      prob->source = zero_field();
      prob->dirichlet = inflow_dirichlet();
      prob->outflow = zero_field();
      m.problem = prob;
      break;
    }
    case ModelName::Rotating52: {
      const index_t n = params.grid_n > 0 ? params.grid_n : 5120;
      const index_t tiles = params.tiles > 0 ? params.tiles : 32;
      const double a_min = params.a_min >= 0.0 ? params.a_min : 1e-6;
      m.grid = std::make_shared<Grid>(n, n, std::array<double, 4>{0, 1, 0, 1}, BoundarySpec::all_dirichlet());
      auto prob = std::make_shared<ProblemSpec>();
      prob->diffusion = checkerboard_diffusion(*m.grid, tiles, tiles, a_min, params.a_max);
      prob->eig_diffusion = prob->diffusion;
      prob->velocity = velocity_rotating();
      prob->source = gaussian_source();
      prob->dirichlet = zero_field();
      prob->outflow = zero_field();
      m.problem = prob;
      break;
    }
    case ModelName::Transport54: {
      const index_t n = params.grid_n > 0 ? params.grid_n : 600;
      const double a_min = params.a_min >= 0.0 ? params.a_min : 0.0;
      BoundarySpec bc;
      bc.left = bc.bottom = BoundaryTag::Dirichlet;
      bc.right = bc.top = BoundaryTag::Outflow;
      m.grid = std::make_shared<Grid>(n, n, std::array<double, 4>{0, 1, 0, 1}, bc);
      auto prob = std::make_shared<ProblemSpec>();
      prob->diffusion.assign(static_cast<std::size_t>(m.grid->cell_count()), a_min);
      // In the vanishing-diffusion limit the eigenproblem's inner product
      // falls back to a constant surrogate diffusion; the harmonic constraint
      // keeps the zero-diffusion operator.
      prob->eig_diffusion.assign(static_cast<std::size_t>(m.grid->cell_count()), a_min > 0.0 ? a_min : 1e-6);
      prob->velocity = velocity_constant();
      prob->source = zero_field();
      prob->dirichlet = inflow_dirichlet();
      prob->outflow = zero_field();
      m.problem = prob;
      break;
    }
  }
  return m;
}

}  // namespace msras
