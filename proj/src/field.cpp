#include "mfsteer/field.hpp"

#include <algorithm>
#include <cmath>

namespace mfsteer {
namespace {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Weights and masses below this are dropped. Their contributions sit far below
// double rounding and would otherwise produce slow subnormal arithmetic.
constexpr double kNegligible = 1e-150;
const double kMaxExponent = -std::log(kNegligible);

// exp(-(s - t)^2 / 2 sigma^2) and (s - t) exp(...) for targets t (rows) and sources s (cols).
void gaussian_tables(const Eigen::VectorXd& targets, const Eigen::VectorXd& sources, double sigma,
                     Eigen::MatrixXd* e, Eigen::MatrixXd* z) {
  const double inv = 1.0 / (2.0 * sigma * sigma);
  e->resize(targets.size(), sources.size());
  z->resize(targets.size(), sources.size());
  for (Eigen::Index s = 0; s < sources.size(); ++s) {
    for (Eigen::Index t = 0; t < targets.size(); ++t) {
      const double d = sources[s] - targets[t];
      const double a = d * d * inv;
      const double w = a > kMaxExponent ? 0.0 : std::exp(-a);
      (*e)(t, s) = w;
      (*z)(t, s) = d * w;
    }
  }
}

Eigen::MatrixXd significant(const Eigen::MatrixXd& mass) {
  return (mass.array() < kNegligible).select(0.0, mass);
}

Eigen::VectorXd face_coordinates(double lo, double dx, int n) {
  Eigen::VectorXd out(n + 1);
  for (int a = 0; a <= n; ++a) out[a] = lo + a * dx;
  return out;
}

}  // namespace

GridFieldEvaluator::GridFieldEvaluator(const Grid& grid, const KernelSet& kernels) : grid_(grid), kernels_(kernels) {
  xs_.resize(grid.nx);
  ys_.resize(grid.ny);
  for (int i = 0; i < grid.nx; ++i) xs_[i] = grid.x_center(i);
  for (int j = 0; j < grid.ny; ++j) ys_[j] = grid.y_center(j);
  const Eigen::VectorXd x_faces = face_coordinates(grid.x_min, grid.dx, grid.nx);
  const Eigen::VectorXd y_faces = face_coordinates(grid.y_min, grid.dx, grid.ny);

  const std::pair<double, const GaussianProfile*> parts[] = {{+1.0, &kernels.attract_mu}, {-1.0, &kernels.repel_mu}};
  for (const auto& [sign, profile] : parts) {
    if (profile->k == 0.0) continue;
    Term t;
    t.coeff = sign * profile->k;
    t.sigma = profile->sigma;
    Eigen::MatrixXd scratch;
    gaussian_tables(xs_, xs_, t.sigma, &t.ex_center, &t.zx_center);
    gaussian_tables(x_faces, xs_, t.sigma, &scratch, &t.zx_face);
    gaussian_tables(ys_, ys_, t.sigma, &t.ey_center, &t.zy_center);
    gaussian_tables(y_faces, ys_, t.sigma, &scratch, &t.zy_face);
    terms_.push_back(std::move(t));
  }
}

GridFieldEvaluator::Support GridFieldEvaluator::support(const DensityField& density) const {
  Support box{grid_.nx, -1, grid_.ny, -1};
  const auto mass = density.mass();
  for (int j = 0; j < grid_.ny; ++j) {
    for (int i = 0; i < grid_.nx; ++i) {
      if (mass[static_cast<std::size_t>(grid_.index(i, j))] < kNegligible) continue;
      box.i0 = std::min(box.i0, i);
      box.i1 = std::max(box.i1, i);
      box.j0 = std::min(box.j0, j);
      box.j1 = std::max(box.j1, j);
    }
  }
  return box;
}

LatticeVelocity GridFieldEvaluator::lattice_velocity(const DensityField& density, std::span<const Vec2> agents) const {
  const int nx = grid_.nx;
  const int ny = grid_.ny;
  const Eigen::Map<const RowMajorMatrix> full(density.mass().data(), ny, nx);

  LatticeVelocity v;
  v.vx_center = Eigen::MatrixXd::Zero(ny, nx);
  v.vy_center = Eigen::MatrixXd::Zero(ny, nx);
  v.vx_xface = Eigen::MatrixXd::Zero(ny, nx + 1);
  v.vy_yface = Eigen::MatrixXd::Zero(ny + 1, nx);

  const Support box = support(density);
  if (!box.empty()) {
    const int w = box.i1 - box.i0 + 1;
    const int h = box.j1 - box.j0 + 1;
    const Eigen::MatrixXd mass = significant(full.block(box.j0, box.i0, h, w));
    for (const Term& t : terms_) {
      const Eigen::MatrixXd ey_mass = t.ey_center.middleCols(box.j0, h) * mass;  // ny x w
      const Eigen::MatrixXd zy_mass = t.zy_center.middleCols(box.j0, h) * mass;
      const Eigen::MatrixXd zyf_mass = t.zy_face.middleCols(box.j0, h) * mass;
      const auto ex = t.ex_center.middleCols(box.i0, w);
      v.vx_center.noalias() += t.coeff * (ey_mass * t.zx_center.middleCols(box.i0, w).transpose());
      v.vx_xface.noalias() += t.coeff * (ey_mass * t.zx_face.middleCols(box.i0, w).transpose());
      v.vy_center.noalias() += t.coeff * (zy_mass * ex.transpose());
      v.vy_yface.noalias() += t.coeff * (zyf_mass * ex.transpose());
    }
  }

  if (!agents.empty()) {
    // f(y - x) = -k exp(-|y - x|^2 / 2s^2) (y - x) also factors along the axes.
    const GaussianProfile& f = kernels_.leader_repel;
    const double c = -f.k / static_cast<double>(agents.size());
    const Eigen::VectorXd x_faces = face_coordinates(grid_.x_min, grid_.dx, nx);
    const Eigen::VectorXd y_faces = face_coordinates(grid_.y_min, grid_.dx, ny);
    Eigen::VectorXd src(1);
    Eigen::MatrixXd ex, zx, exf, zxf, ey, zy, eyf, zyf;
    for (const Vec2& a : agents) {
      src[0] = a.x();
      gaussian_tables(xs_, src, f.sigma, &ex, &zx);
      gaussian_tables(x_faces, src, f.sigma, &exf, &zxf);
      src[0] = a.y();
      gaussian_tables(ys_, src, f.sigma, &ey, &zy);
      gaussian_tables(y_faces, src, f.sigma, &eyf, &zyf);
      v.vx_center.noalias() += c * (ey * zx.transpose());
      v.vy_center.noalias() += c * (zy * ex.transpose());
      v.vx_xface.noalias() += c * (ey * zxf.transpose());
      v.vy_yface.noalias() += c * (zyf * ex.transpose());
    }
  }
  return v;
}

Points GridFieldEvaluator::velocity_at(const DensityField& density, std::span<const Vec2> points,
                                       std::span<const Vec2> agents) const {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::VectorXd vx = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd vy = Eigen::VectorXd::Zero(n);

  const Support box = support(density);
  if (!box.empty()) {
    const int w = box.i1 - box.i0 + 1;
    const int h = box.j1 - box.j0 + 1;
    const Eigen::Map<const RowMajorMatrix> full(density.mass().data(), grid_.ny, grid_.nx);
    const Eigen::MatrixXd mass = significant(full.block(box.j0, box.i0, h, w));
    const Eigen::VectorXd sx = xs_.segment(box.i0, w);
    const Eigen::VectorXd sy = ys_.segment(box.j0, h);
    Eigen::VectorXd px(n), py(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      px[k] = points[static_cast<std::size_t>(k)].x();
      py[k] = points[static_cast<std::size_t>(k)].y();
    }
    Eigen::MatrixXd ex, zx, ey, zy;
    for (const Term& t : terms_) {
      gaussian_tables(px, sx, t.sigma, &ex, &zx);
      gaussian_tables(py, sy, t.sigma, &ey, &zy);
      const Eigen::MatrixXd mzx = mass * zx.transpose();  // h x n
      const Eigen::MatrixXd mex = mass * ex.transpose();
      vx += t.coeff * (ey.transpose().cwiseProduct(mzx)).colwise().sum().transpose();
      vy += t.coeff * (zy.transpose().cwiseProduct(mex)).colwise().sum().transpose();
    }
  }

  Points out(points.size());
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& p = points[static_cast<std::size_t>(k)];
    out[static_cast<std::size_t>(k)] = Vec2(vx[k], vy[k]) + agent_push(p, agents, kernels_);
  }
  return out;
}

}  // namespace mfsteer
