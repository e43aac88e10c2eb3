#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "mfsteer/geometry.hpp"
#include "mfsteer/kernels.hpp"

namespace mfsteer {

/// Velocity of the non-local field on the staggered lattices used by the
/// finite-volume scheme. Matrices are indexed (row = y index, col = x index).
struct LatticeVelocity {
  Eigen::MatrixXd vx_center;  // ny x nx
  Eigen::MatrixXd vy_center;  // ny x nx
  Eigen::MatrixXd vx_xface;   // ny x (nx + 1), face a sits at x_min + a dx
  Eigen::MatrixXd vy_yface;   // (ny + 1) x nx, face b sits at y_min + b dx
};

/// Evaluates F[mu](x, y) for a density on a fixed grid.
///
/// The Gaussian factors exp(-|z|^2 / 2s^2) split into x and y parts, so the
/// direct sum over all source cells for a whole lattice of evaluation points
/// reduces to products of (targets x sources) weight tables with the mass
/// matrix. The tables depend only on grid and kernels and are built once.
class GridFieldEvaluator {
 public:
  GridFieldEvaluator(const Grid& grid, const KernelSet& kernels);

  const Grid& grid() const { return grid_; }
  const KernelSet& kernels() const { return kernels_; }

  /// Full field (convolution plus agent push) at cell centers and faces.
  LatticeVelocity lattice_velocity(const DensityField& density, std::span<const Vec2> agents) const;

  /// Full field at arbitrary points.
  Points velocity_at(const DensityField& density, std::span<const Vec2> points, std::span<const Vec2> agents) const;

 private:
  struct Support {
    int i0, i1, j0, j1;  // inclusive bounds of the cells carrying mass
    bool empty() const { return i1 < i0; }
  };
  Support support(const DensityField& density) const;

  struct Term {
    double coeff;  // K(z) = sum_t coeff_t exp(-|z|^2 / 2 sigma_t^2) z
    double sigma;
    Eigen::MatrixXd ex_center, zx_center, zx_face;  // targets x sources along x
    Eigen::MatrixXd ey_center, zy_center, zy_face;  // targets x sources along y
  };

  Grid grid_;
  KernelSet kernels_;
  std::vector<Term> terms_;
  Eigen::VectorXd xs_, ys_;  // source cell centers
};

}  // namespace mfsteer
