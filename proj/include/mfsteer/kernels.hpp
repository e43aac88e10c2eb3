#pragma once

#include <span>

#include "mfsteer/geometry.hpp"
#include "mfsteer/types.hpp"

namespace mfsteer {

/// Gaussian radial profile h(d) = -k exp(-d^2 / (2 sigma^2)).
struct GaussianProfile {
  double k = 0.0;
  double sigma = 1.0;

  double value(double dist) const;
  /// h'(d) / d, which is smooth at d = 0: (k / sigma^2) exp(-d^2 / (2 sigma^2)).
  double slope_over_dist(double dist) const;
  void validate(const char* name) const;
};

/// Parameters of the three interaction fields:
///   K(z) = (-h_attract(|z|) + h_repel(|z|)) z   population self-interaction
///   f(z) = h_leader_repel(|z|) z                 agents acting on the population
///   g(z) = -h_leader_attract(|z|) z              agents acting on each other
struct KernelSet {
  GaussianProfile attract_mu{3.0, 0.25};
  GaussianProfile repel_mu{30.0, 0.1};
  GaussianProfile leader_repel{22.0, 0.325};
  GaussianProfile leader_attract{30.0, 0.1};

  /// All strengths zero: every field vanishes identically.
  static KernelSet zero();
  void validate() const;
};

double profile_eval(const GaussianProfile& profile, double dist);

Vec2 kernel_K(const Vec2& z, const KernelSet& ks);
Vec2 kernel_f(const Vec2& z, const KernelSet& ks);
Vec2 kernel_g(const Vec2& z, const KernelSet& ks);

/// Derivative of z -> h(|z|) z: h I + (h'(|z|)/|z|) z z^T. Symmetric, even in z.
Mat2 jacobian_radial_kernel(const GaussianProfile& profile, const Vec2& z);

Mat2 jacobian_K(const Vec2& z, const KernelSet& ks);
Mat2 jacobian_f(const Vec2& z, const KernelSet& ks);
Mat2 jacobian_g(const Vec2& z, const KernelSet& ks);

/// F[mu](x, y) = sum_c K(x_c - x) m_c + (1/M) sum_m f(y_m - x), quadrature over cell centers.
Vec2 field_F(const DensityField& density, const Vec2& x, std::span<const Vec2> agents, const KernelSet& ks);
/// Same field with the measure given by tracer nodes (positions, weights).
Vec2 field_F(const LagrangianCloud& cloud, const Vec2& x, std::span<const Vec2> agents, const KernelSet& ks);
/// Leader term (1/M) sum_m f(y_m - x) alone.
Vec2 agent_push(const Vec2& x, std::span<const Vec2> agents, const KernelSet& ks);
/// G(y)_m = (1/M) sum_j g(y_j - y_m).
Points field_G(std::span<const Vec2> agents, const KernelSet& ks);

}  // namespace mfsteer
