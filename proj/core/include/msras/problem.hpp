#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <string>

#include "msras/grid.hpp"

namespace msras {

using ScalarField = std::function<double(double, double)>;
using VectorField = std::function<Vec2(double, double)>;

/// Coefficients, boundary data and sources of the convection-diffusion model.
/// Diffusion is scalar-isotropic and constant per cell (tensor = a * I);
/// `eig_diffusion` is the surrogate field used by the eigenproblem's
/// a-inner-product (equal to `diffusion` except in transport-limit mode).
/// Immutable; coefficient evaluation is pure and reentrant.
struct ProblemSpec {
  std::vector<double> diffusion;      // per cell, >= 0
  std::vector<double> eig_diffusion;  // per cell, > 0
  VectorField velocity;
  ScalarField source;
  ScalarField dirichlet;  // g on Gamma_D
  ScalarField outflow;    // q on Gamma_O

  double diffusion_of(index_t cell) const { return diffusion[static_cast<std::size_t>(cell)]; }
  double eig_diffusion_of(index_t cell) const { return eig_diffusion[static_cast<std::size_t>(cell)]; }
};

struct CoefficientStats {
  double a_min = 0.0;
  double a_max = 0.0;
  double b_inf = 0.0;  // sup of the Euclidean velocity norm over sample points
};

inline constexpr double kPecletInfinity = std::numeric_limits<double>::infinity();

/// Per-cell checkerboard field: a_hi on even (tile_ix + tile_iy), a_lo on odd.
/// Tile counts must divide the grid dimensions.
std::vector<double> checkerboard_diffusion(const Grid& grid, index_t tiles_x, index_t tiles_y, double a_lo, double a_hi);

/// b = (2/3, 1).
VectorField velocity_constant();

/// Rotating, non-divergence-free velocity field
///   b1 = 20  (x2 - 1/2) [1 - (x1 - 1/2)^2] - 3/2 (x1 - 1/2),
///   b2 = 20 (x1 - 1/2) [1 - (x2 - 1/2)^2] - 3/2 (x2 - 1/2).
VectorField velocity_rotating();

/// f = exp(-((x1 - 1/4)^2 + (x2 - 1/2)^2) / 1e-2).
ScalarField gaussian_source();

/// Samples cell centers plus the four cell corners for b_inf.
CoefficientStats coefficient_stats(const Grid& grid, const ProblemSpec& prob);

/// L * b_inf / a_min; +inf sentinel when a_min == 0. Rejects negative L.
double peclet(const CoefficientStats& stats, double length);

// -- built-in model catalogue -------------------------------------------------

enum class ModelName { Checkerboard51, Rotating52, Transport54 };

struct ModelParams {
  index_t grid_n = 0;     // 0 = model default
  index_t tiles = 0;      // 0 = model default
  double a_min = -1.0;    // < 0 = model default
  double a_max = 1.0;
};

struct Model {
  std::shared_ptr<const Grid> grid;
  std::shared_ptr<const ProblemSpec> problem;
};

ModelName parse_model_name(const std::string& name);

/// Assembles one of the built-in experiment setups:
///  - checkerboard51: unit square, checkerboard diffusion (default 8x8 tiles),
///    b = (2/3,1), f = 0, inflow g = 1 on the left / 0 on the bottom,
///    outflow (q = 0) on right and top.
///  - rotating52: unit square, 32x32 checkerboard, rotating velocity,
///    homogeneous Dirichlet everywhere, Gaussian source.
///  - transport54: constant diffusion a_min (may be 0; the eigenproblem
///    surrogate then uses 1e-6), otherwise the checkerboard51 setup.
Model model_catalogue(ModelName name, const ModelParams& params = {});

}  // namespace msras
