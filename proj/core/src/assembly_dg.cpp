#include "msras/assembly.hpp"

#include <cmath>
#include <stdexcept>

namespace msras {

namespace {

// 2-point Gauss on [0,1].
constexpr double kGaussA = 0.5 - 0.5 / 1.7320508075688772;
constexpr double kGaussB = 0.5 + 0.5 / 1.7320508075688772;
constexpr double kGaussPts[2] = {kGaussA, kGaussB};

// Q1 nodal basis on the reference square, corner order
// (0,0), (1,0), (0,1), (1,1).
void shape(double xi, double eta, double n[4]) {
  n[0] = (1.0 - xi) * (1.0 - eta);
  n[1] = xi * (1.0 - eta);
  n[2] = (1.0 - xi) * eta;
  n[3] = xi * eta;
}

void shape_grad(double xi, double eta, double dxi[4], double deta[4]) {
  dxi[0] = -(1.0 - eta);
  dxi[1] = (1.0 - eta);
  dxi[2] = -eta;
  dxi[3] = eta;
  deta[0] = -(1.0 - xi);
  deta[1] = -xi;
  deta[2] = (1.0 - xi);
  deta[3] = xi;
}

struct FaceTrace {
  // Shape values and normal derivatives on the two face quadrature points,
  // for the minus and plus cell of the face.
  double phi_m[2][4], phi_p[2][4];
  double dn_m[2][4], dn_p[2][4];
};

enum class Mode { Full, AForm };

class DgAssembler {
public:
  DgAssembler(const Grid& grid, const ProblemSpec& prob, const DGParams& params, Mode mode)
      : grid_(grid), prob_(prob), params_(params), mode_(mode) {
    if (params.degree != 1) throw std::invalid_argument("assemble_dg: only degree 1 is supported");
    if (!(params.alpha > 0.0)) throw std::invalid_argument("assemble_dg: penalty scale must be positive");
    hx_ = grid.hx();
    hy_ = grid.hy();
    if (!(hx_ > 0.0) || !(hy_ > 0.0)) throw std::invalid_argument("assemble_dg: zero-measure faces");

    // Unit-diffusion volume stiffness (identical for every cell).
    for (auto& r : kdiff_)
      r.fill(0.0);
    for (double gx : kGaussPts) {
      for (double gy : kGaussPts) {
        double dxi[4], deta[4];
        shape_grad(gx, gy, dxi, deta);
        const double w = 0.25 * hx_ * hy_;
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j)
            kdiff_[i][j] += w * (dxi[i] / hx_ * (dxi[j] / hx_) + deta[i] / hy_ * (deta[j] / hy_));
      }
    }

    // Face traces. dN/dxi depends only on eta (and vice versa), so the normal
    // derivative is the same from both sides of a face.
    for (int q = 0; q < 2; ++q) {
      const double t = kGaussPts[q];
      double dxi[4], deta[4];
      shape(1.0, t, vert_.phi_m[q]);
      shape(0.0, t, vert_.phi_p[q]);
      shape_grad(0.0, t, dxi, deta);
      for (int i = 0; i < 4; ++i) vert_.dn_m[q][i] = vert_.dn_p[q][i] = dxi[i] / hx_;

      shape(t, 1.0, horz_.phi_m[q]);
      shape(t, 0.0, horz_.phi_p[q]);
      shape_grad(t, 0.0, dxi, deta);
      for (int i = 0; i < 4; ++i) horz_.dn_m[q][i] = horz_.dn_p[q][i] = deta[i] / hy_;
    }
  }

  // cell_map[c] = local block index (or -1 when c is outside the submesh).
  // F may be null (a-form assembly has no right-hand side).
  SparseMatrix assemble(std::span<const index_t> cell_map, index_t n_blocks, std::vector<double>* f_out) {
    const index_t n = 4 * n_blocks;
    std::vector<Triplet> trip;
    const std::size_t face_guess = static_cast<std::size_t>(grid_.interior_faces().size()) * 64;
    trip.reserve(static_cast<std::size_t>(n_blocks) * 16 + face_guess);
    if (f_out) f_out->assign(static_cast<std::size_t>(n), 0.0);

    for (index_t cell = 0; cell < grid_.cell_count(); ++cell) {
      const index_t blk = cell_map[cell];
      if (blk < 0) continue;
      add_volume(cell, blk, trip, f_out);
    }
    for (const InteriorFace& face : grid_.interior_faces()) {
      const index_t bm = cell_map[face.minus_cell];
      const index_t bp = cell_map[face.plus_cell];
      if (bm < 0 || bp < 0) continue;  // crossing/outside faces contribute nothing here
      add_interior_face(face, bm, bp, trip);
    }
    for (const BoundaryFace& face : grid_.boundary_faces()) {
      const index_t blk = cell_map[face.cell];
      if (blk < 0) continue;
      add_boundary_face(face, blk, trip, f_out);
    }
    return SparseMatrix::from_triplets(n, n, std::move(trip));
  }

private:
  double diffusion_of(index_t cell) const {
    return mode_ == Mode::Full ? prob_.diffusion_of(cell) : prob_.eig_diffusion_of(cell);
  }

  void add_volume(index_t cell, index_t blk, std::vector<Triplet>& trip, std::vector<double>* f_out) {
    const double a = diffusion_of(cell);
    double block[4][4];
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) block[i][j] = a * kdiff_[i][j];

    if (mode_ == Mode::Full) {
      const Vec2 o = grid_.cell_origin(cell);
      for (double gx : kGaussPts) {
        for (double gy : kGaussPts) {
          const double w = 0.25 * hx_ * hy_;
          double nsh[4], dxi[4], deta[4];
          shape(gx, gy, nsh);
          shape_grad(gx, gy, dxi, deta);
          const Vec2 b = prob_.velocity(o.x + gx * hx_, o.y + gy * hy_);
          const double fval = f_out ? prob_.source(o.x + gx * hx_, o.y + gy * hy_) : 0.0;
          for (int i = 0; i < 4; ++i) {
            const double bgrad_i = b.x * dxi[i] / hx_ + b.y * deta[i] / hy_;
            for (int j = 0; j < 4; ++j) block[i][j] -= w * nsh[j] * bgrad_i;
            if (f_out) (*f_out)[4 * blk + i] += w * fval * nsh[i];
          }
        }
      }
    }
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) trip.push_back({4 * blk + i, 4 * blk + j, block[i][j]});
  }

  void add_interior_face(const InteriorFace& face, index_t bm, index_t bp, std::vector<Triplet>& trip) {
    const bool vertical = face.normal.x != 0.0;
    const FaceTrace& tr = vertical ? vert_ : horz_;
    const double am = diffusion_of(face.minus_cell);
    const double ap = diffusion_of(face.plus_cell);

    const auto [wm, wp] = dg_face_weights(am, ap);
    const double sigma = dg_penalty(params_, am, ap, face.measure, hx_ * hy_);

    const Vec2 o = grid_.cell_origin(face.minus_cell);
    double block[8][8] = {};
    for (int q = 0; q < 2; ++q) {
      const double t = kGaussPts[q];
      const double w = 0.5 * face.measure;
      Vec2 x;
      if (vertical)
        x = {o.x + hx_, o.y + t * hy_};
      else
        x = {o.x + t * hx_, o.y + hy_};
      const Vec2 b = mode_ == Mode::Full ? prob_.velocity(x.x, x.y) : Vec2{0.0, 0.0};
      const double bn = b.x * face.normal.x + b.y * face.normal.y;
      const double jump_coef = sigma + (mode_ == Mode::Full ? 0.5 * std::abs(bn) : 0.0);

      // side 0 = minus, side 1 = plus; jump sign +1 / -1.
      const double* phis[2] = {tr.phi_m[q], tr.phi_p[q]};
      const double* dns[2] = {tr.dn_m[q], tr.dn_p[q]};
      const double wflux[2] = {wm * am, wp * ap};
      const double signs[2] = {1.0, -1.0};
      for (int sv = 0; sv < 2; ++sv) {
        for (int su = 0; su < 2; ++su) {
          for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
              double val = jump_coef * signs[su] * signs[sv] * phis[su][j] * phis[sv][i];
              if (mode_ == Mode::Full) val += bn * 0.5 * phis[su][j] * signs[sv] * phis[sv][i];
              val -= wflux[su] * dns[su][j] * signs[sv] * phis[sv][i];
              val -= wflux[sv] * dns[sv][i] * signs[su] * phis[su][j];
              block[4 * sv + i][4 * su + j] += w * val;
            }
          }
        }
      }
    }
    const index_t base[2] = {4 * bm, 4 * bp};
    for (int sv = 0; sv < 2; ++sv)
      for (int su = 0; su < 2; ++su)
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j) trip.push_back({base[sv] + i, base[su] + j, block[4 * sv + i][4 * su + j]});
  }

  void add_boundary_face(const BoundaryFace& face, index_t blk, std::vector<Triplet>& trip, std::vector<double>* f_out) {
    const bool dirichlet = face.tag == BoundaryTag::Dirichlet;
    if (mode_ == Mode::AForm && !dirichlet) return;

    const double a = diffusion_of(face.cell);
    // boundary faces: delta_{A nu} is the one-sided value
    const double sigma = params_.alpha * a * 2.0 * face.measure / (hx_ * hy_);
    const Vec2 o = grid_.cell_origin(face.cell);

    // Trace data for the four sides.
    double phi[2][4], dn[2][4];
    for (int q = 0; q < 2; ++q) {
      const double t = kGaussPts[q];
      double dxi[4], deta[4];
      switch (face.side) {
        case Side::Left:
          shape(0.0, t, phi[q]);
          shape_grad(0.0, t, dxi, deta);
          for (int i = 0; i < 4; ++i) dn[q][i] = -dxi[i] / hx_;
          break;
        case Side::Right:
          shape(1.0, t, phi[q]);
          shape_grad(1.0, t, dxi, deta);
          for (int i = 0; i < 4; ++i) dn[q][i] = dxi[i] / hx_;
          break;
        case Side::Bottom:
          shape(t, 0.0, phi[q]);
          shape_grad(t, 0.0, dxi, deta);
          for (int i = 0; i < 4; ++i) dn[q][i] = -deta[i] / hy_;
          break;
        case Side::Top:
          shape(t, 1.0, phi[q]);
          shape_grad(t, 1.0, dxi, deta);
          for (int i = 0; i < 4; ++i) dn[q][i] = deta[i] / hy_;
          break;
      }
    }

    double block[4][4] = {};
    for (int q = 0; q < 2; ++q) {
      const double t = kGaussPts[q];
      const double w = 0.5 * face.measure;
      Vec2 x;
      switch (face.side) {
        case Side::Left: x = {o.x, o.y + t * hy_}; break;
        case Side::Right: x = {o.x + hx_, o.y + t * hy_}; break;
        case Side::Bottom: x = {o.x + t * hx_, o.y}; break;
        case Side::Top: x = {o.x + t * hx_, o.y + hy_}; break;
      }
      const Vec2 b = mode_ == Mode::Full ? prob_.velocity(x.x, x.y) : Vec2{0.0, 0.0};
      const double bn = b.x * face.normal.x + b.y * face.normal.y;

      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
          double val = 0.0;
          if (mode_ == Mode::Full) val += std::max(bn, 0.0) * phi[q][j] * phi[q][i];
          if (dirichlet) val += sigma * phi[q][j] * phi[q][i] - a * dn[q][j] * phi[q][i] - a * dn[q][i] * phi[q][j];
          block[i][j] += w * val;
        }
      }
      if (f_out && mode_ == Mode::Full) {
        if (dirichlet) {
          const double g = prob_.dirichlet(x.x, x.y);
          for (int i = 0; i < 4; ++i)
            (*f_out)[4 * blk + i] += w * g * (sigma * phi[q][i] - a * dn[q][i] + std::max(-bn, 0.0) * phi[q][i]);
        } else {
          const double qv = prob_.outflow(x.x, x.y);
          for (int i = 0; i < 4; ++i) (*f_out)[4 * blk + i] -= w * qv * phi[q][i];
        }
      }
    }
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) trip.push_back({4 * blk + i, 4 * blk + j, block[i][j]});
  }

  const Grid& grid_;
  const ProblemSpec& prob_;
  DGParams params_;
  Mode mode_;
  double hx_ = 0, hy_ = 0;
  std::array<std::array<double, 4>, 4> kdiff_{};
  FaceTrace vert_{}, horz_{};
};

std::vector<index_t> identity_cell_map(index_t n) {
  std::vector<index_t> map(static_cast<std::size_t>(n));
  for (index_t c = 0; c < n; ++c) map[static_cast<std::size_t>(c)] = c;
  return map;
}

}  // namespace

double dg_penalty(const DGParams& params, double a_minus, double a_plus, double face_measure, double min_cell_volume) {
  const double dsum = a_minus + a_plus;
  const double harm = dsum > 0.0 ? 2.0 * a_minus * a_plus / dsum : 0.0;
  const double degree_factor = static_cast<double>(params.degree * (params.degree + 1));  // p(p+d-1), d = 2
  return params.alpha * harm * degree_factor * face_measure / min_cell_volume;
}

std::pair<double, double> dg_face_weights(double a_minus, double a_plus) {
  const double dsum = a_minus + a_plus;
  if (dsum <= 0.0) return {0.5, 0.5};
  return {a_plus / dsum, a_minus / dsum};
}

DiscreteSystem assemble_dg(std::shared_ptr<const Grid> grid, std::shared_ptr<const ProblemSpec> prob, const DGParams& params) {
  if (prob->diffusion.size() != static_cast<std::size_t>(grid->cell_count()) ||
      prob->eig_diffusion.size() != prob->diffusion.size())
    throw std::invalid_argument("assemble_dg: diffusion field size does not match the grid");

  DiscreteSystem sys;
  sys.dofs_per_cell = 4;
  sys.backend = Discretization::DG;
  sys.grid = std::move(grid);
  sys.problem = std::move(prob);
  sys.params = params;

  const std::vector<index_t> map = identity_cell_map(sys.grid->cell_count());
  DgAssembler full(*sys.grid, *sys.problem, params, Mode::Full);
  sys.B = full.assemble(map, sys.grid->cell_count(), &sys.F).pruned(0.0);
  DgAssembler aform(*sys.grid, *sys.problem, params, Mode::AForm);
  sys.A_a = aform.assemble(map, sys.grid->cell_count(), nullptr).pruned(0.0);
  return sys;
}

SparseMatrix dg_local_aform(const DiscreteSystem& sys, std::span<const index_t> cells) {
  std::vector<index_t> map(static_cast<std::size_t>(sys.grid->cell_count()), -1);
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k > 0 && cells[k] <= cells[k - 1]) throw std::invalid_argument("local_aform: cell set not sorted/unique");
    map[cells[k]] = static_cast<index_t>(k);
  }
  DgAssembler aform(*sys.grid, *sys.problem, sys.params, Mode::AForm);
  return aform.assemble(map, static_cast<index_t>(cells.size()), nullptr);
}

}  // namespace msras
