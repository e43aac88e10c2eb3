#include "mfsteer/kernels.hpp"

#include <cmath>
#include <string>

namespace mfsteer {

double GaussianProfile::value(double dist) const {
  return -k * std::exp(-dist * dist / (2.0 * sigma * sigma));
}

double GaussianProfile::slope_over_dist(double dist) const {
  return k / (sigma * sigma) * std::exp(-dist * dist / (2.0 * sigma * sigma));
}

void GaussianProfile::validate(const char* name) const {
  if (!(k >= 0.0) || !std::isfinite(k)) throw ConfigError(std::string("kernels.") + name + ".k must be >= 0");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ConfigError(std::string("kernels.") + name + ".sigma must be > 0");
  }
}

KernelSet KernelSet::zero() {
  KernelSet ks;
  ks.attract_mu.k = 0.0;
  ks.repel_mu.k = 0.0;
  ks.leader_repel.k = 0.0;
  ks.leader_attract.k = 0.0;
  return ks;
}

void KernelSet::validate() const {
  attract_mu.validate("attract_mu");
  repel_mu.validate("repel_mu");
  leader_repel.validate("leader_repel");
  leader_attract.validate("leader_attract");
  if (!(repel_mu.sigma < attract_mu.sigma)) {
    throw ConfigError("kernels: repel_mu.sigma must be smaller than attract_mu.sigma");
  }
}

double profile_eval(const GaussianProfile& profile, double dist) { return profile.value(dist); }

Vec2 kernel_K(const Vec2& z, const KernelSet& ks) {
  const double d = z.norm();
  return (-ks.attract_mu.value(d) + ks.repel_mu.value(d)) * z;
}

Vec2 kernel_f(const Vec2& z, const KernelSet& ks) { return ks.leader_repel.value(z.norm()) * z; }

Vec2 kernel_g(const Vec2& z, const KernelSet& ks) { return -ks.leader_attract.value(z.norm()) * z; }

Mat2 jacobian_radial_kernel(const GaussianProfile& profile, const Vec2& z) {
  const double d = z.norm();
  return profile.value(d) * Mat2::Identity() + profile.slope_over_dist(d) * (z * z.transpose());
}

Mat2 jacobian_K(const Vec2& z, const KernelSet& ks) {
  return -jacobian_radial_kernel(ks.attract_mu, z) + jacobian_radial_kernel(ks.repel_mu, z);
}

Mat2 jacobian_f(const Vec2& z, const KernelSet& ks) { return jacobian_radial_kernel(ks.leader_repel, z); }

Mat2 jacobian_g(const Vec2& z, const KernelSet& ks) { return -jacobian_radial_kernel(ks.leader_attract, z); }

Vec2 agent_push(const Vec2& x, std::span<const Vec2> agents, const KernelSet& ks) {
  Vec2 acc = Vec2::Zero();
  if (agents.empty()) return acc;
  for (const auto& y : agents) acc += kernel_f(y - x, ks);
  return acc / static_cast<double>(agents.size());
}

Vec2 field_F(const DensityField& density, const Vec2& x, std::span<const Vec2> agents, const KernelSet& ks) {
  const Grid& g = density.grid();
  Vec2 acc = Vec2::Zero();
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double m = density.mass_at(i, j);
      if (m != 0.0) acc += m * kernel_K(g.cell_center(i, j) - x, ks);
    }
  }
  return acc + agent_push(x, agents, ks);
}

Vec2 field_F(const LagrangianCloud& cloud, const Vec2& x, std::span<const Vec2> agents, const KernelSet& ks) {
  Vec2 acc = Vec2::Zero();
  for (std::size_t n = 0; n < cloud.size(); ++n) acc += cloud.weights[n] * kernel_K(cloud.positions[n] - x, ks);
  return acc + agent_push(x, agents, ks);
}

Points field_G(std::span<const Vec2> agents, const KernelSet& ks) {
  const std::size_t m_count = agents.size();
  Points out(m_count, Vec2::Zero());
  const double inv_m = 1.0 / static_cast<double>(m_count);
  for (std::size_t m = 0; m < m_count; ++m) {
    for (std::size_t j = 0; j < m_count; ++j) {
      if (j != m) out[m] += kernel_g(agents[j] - agents[m], ks);
    }
    out[m] *= inv_m;
  }
  return out;
}

}  // namespace mfsteer
