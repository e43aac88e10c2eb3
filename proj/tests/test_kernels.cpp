#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "mfsteer/kernels.hpp"
#include "support.hpp"

namespace mfsteer {
namespace {

using testing::random_point;

Mat2 central_jacobian(const std::function<Vec2(const Vec2&)>& fn, const Vec2& z, double h) {
  Mat2 out;
  for (int c = 0; c < 2; ++c) {
    Vec2 e = Vec2::Zero();
    e[c] = h;
    out.col(c) = (fn(z + e) - fn(z - e)) / (2.0 * h);
  }
  return out;
}

TEST(ProfileEval, Examples) {
  const GaussianProfile p{3.0, 0.25};
  EXPECT_EQ(profile_eval(p, 0.0), -3.0);
  EXPECT_EQ(profile_eval(p, 1e3), 0.0);
  EXPECT_DOUBLE_EQ(profile_eval(p, 0.25), -3.0 * std::exp(-0.5));
}

TEST(KernelSet, DefaultsAndValidation) {
  const KernelSet ks;
  EXPECT_EQ(ks.attract_mu.k, 3.0);
  EXPECT_EQ(ks.attract_mu.sigma, 0.25);
  EXPECT_EQ(ks.repel_mu.k, 30.0);
  EXPECT_EQ(ks.repel_mu.sigma, 0.1);
  EXPECT_EQ(ks.leader_repel.k, 22.0);
  EXPECT_EQ(ks.leader_repel.sigma, 0.325);
  EXPECT_EQ(ks.leader_attract.k, 30.0);
  EXPECT_EQ(ks.leader_attract.sigma, 0.1);
  EXPECT_NO_THROW(ks.validate());

  KernelSet bad = ks;
  bad.repel_mu.sigma = 0.3;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = ks;
  bad.leader_repel.k = -1.0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = ks;
  bad.leader_attract.sigma = 0.0;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(KernelK, OriginOddnessAndShortRangeRepulsion) {
  const KernelSet ks;
  EXPECT_EQ(kernel_K(Vec2::Zero(), ks), Vec2::Zero());
  const Vec2 z(0.3, -0.1);
  EXPECT_EQ(kernel_K(-z, ks), -kernel_K(z, ks));
  // K(z) is the velocity induced at x by mass at x + z, so a negative x component is repulsion.
  const double expected = (3.0 * std::exp(-0.02) - 30.0 * std::exp(-0.125)) * 0.05;
  EXPECT_DOUBLE_EQ(kernel_K(Vec2(0.05, 0.0), ks).x(), expected);
  EXPECT_LT(kernel_K(Vec2(0.05, 0.0), ks).x(), 0.0);
  EXPECT_GT(kernel_K(Vec2(0.5, 0.0), ks).x(), 0.0);
}

TEST(KernelFG, OriginAndSigns) {
  const KernelSet ks;
  EXPECT_EQ(kernel_f(Vec2::Zero(), ks), Vec2::Zero());
  EXPECT_EQ(kernel_g(Vec2::Zero(), ks), Vec2::Zero());
  const Vec2 z(0.0, 0.2);  // y above x
  EXPECT_LT(kernel_f(z, ks).dot(z), 0.0);
  EXPECT_GT(kernel_g(z, ks).dot(z), 0.0);
}

TEST(Kernels, OddnessOnRandomPoints) {
  const KernelSet ks;
  std::mt19937_64 rng(11);
  for (int n = 0; n < 200; ++n) {
    const Vec2 z = random_point(rng);
    EXPECT_EQ(kernel_K(-z, ks), -kernel_K(z, ks));
    EXPECT_EQ(kernel_f(-z, ks), -kernel_f(z, ks));
    EXPECT_EQ(kernel_g(-z, ks), -kernel_g(z, ks));
    EXPECT_EQ(jacobian_K(-z, ks), jacobian_K(z, ks));
    EXPECT_EQ(jacobian_f(-z, ks), jacobian_f(z, ks));
    EXPECT_EQ(jacobian_g(-z, ks), jacobian_g(z, ks));
  }
}

TEST(Jacobian, OriginLimit) {
  const GaussianProfile p{3.0, 0.25};
  EXPECT_EQ(jacobian_radial_kernel(p, Vec2::Zero()), -3.0 * Mat2::Identity());
}

TEST(Jacobian, MatchesFiniteDifferenceAtSpecPoint) {
  const GaussianProfile p{3.0, 0.25};
  const Vec2 z(0.2, 0.1);
  const Mat2 fd = central_jacobian([&](const Vec2& v) { return Vec2(p.value(v.norm()) * v); }, z, 1e-5);
  const Mat2 an = jacobian_radial_kernel(p, z);
  EXPECT_LE((an - fd).norm() / an.norm(), 1e-6);
}

TEST(Jacobian, MatchesFiniteDifferenceOnRandomPoints) {
  const KernelSet ks;
  std::mt19937_64 rng(5);
  const std::function<Vec2(const Vec2&)> fns[] = {
      [&](const Vec2& z) { return kernel_K(z, ks); },
      [&](const Vec2& z) { return kernel_f(z, ks); },
      [&](const Vec2& z) { return kernel_g(z, ks); },
  };
  const std::function<Mat2(const Vec2&)> jacs[] = {
      [&](const Vec2& z) { return jacobian_K(z, ks); },
      [&](const Vec2& z) { return jacobian_f(z, ks); },
      [&](const Vec2& z) { return jacobian_g(z, ks); },
  };
  for (int n = 0; n < 100; ++n) {
    const Vec2 z = random_point(rng);
    for (int k = 0; k < 3; ++k) {
      const Mat2 an = jacs[k](z);
      const Mat2 fd = central_jacobian(fns[k], z, 1e-5);
      // absolute floor for points where the Gaussian tail has vanished
      EXPECT_LE((an - fd).norm(), 1e-6 * std::max(an.norm(), 1e-3)) << "kernel " << k << " at " << z.transpose();
    }
  }
}

TEST(FieldF, SelfCellAndSymmetricPair) {
  const KernelSet ks;
  const Grid g = build_grid(-1, 1, -1, 1, 0.5);
  std::vector<double> one(16, 0.0);
  one[g.index(1, 1)] = 1.0;
  const DensityField self = DensityField::from_masses(g, one);
  EXPECT_EQ(field_F(self, g.cell_center(1, 1), {}, ks), Vec2::Zero());

  std::vector<double> pair(16, 0.0);
  pair[g.index(0, 1)] = 0.5;
  pair[g.index(2, 1)] = 0.5;
  const Vec2 f = field_F(DensityField::from_masses(g, pair), g.cell_center(1, 1), {}, ks);
  EXPECT_NEAR(f.norm(), 0.0, 1e-15);
}

TEST(FieldF, SingleAgentTerm) {
  const KernelSet ks;
  LagrangianCloud cloud{{Vec2(0.3, 0.3)}, {Vec2(0.3, 0.3)}, {1.0}};
  const Vec2 x(0.3, 0.3);
  const Points agents{Vec2(0.5, 0.2)};
  EXPECT_EQ(field_F(cloud, x, agents, ks), kernel_f(agents[0] - x, ks));
  const Points two{Vec2(0.5, 0.2), Vec2(-1.0, 0.0)};
  const Vec2 expected = 0.5 * (kernel_f(two[0] - x, ks) + kernel_f(two[1] - x, ks));
  EXPECT_LT((field_F(cloud, x, two, ks) - expected).norm(), 1e-15);
}

TEST(FieldF, LinearInMeasure) {
  const KernelSet ks;
  const Grid g = build_grid(-1, 1, -1, 1, 0.25);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w1(g.cell_count()), w2(g.cell_count()), mix(g.cell_count());
  for (auto& w : w1) w = u(rng);
  for (auto& w : w2) w = u(rng);
  const DensityField d1 = DensityField::normalized(g, w1);
  const DensityField d2 = DensityField::normalized(g, w2);
  const double lambda = 0.3;
  for (std::size_t k = 0; k < mix.size(); ++k) mix[k] = lambda * d1.mass()[k] + (1 - lambda) * d2.mass()[k];
  const DensityField dm = DensityField::from_masses(g, mix);
  const Points agents{Vec2(0.1, 0.2)};
  for (int n = 0; n < 20; ++n) {
    const Vec2 x = random_point(rng);
    const Vec2 lhs = field_F(dm, x, agents, ks);
    const Vec2 rhs = lambda * field_F(d1, x, agents, ks) + (1 - lambda) * field_F(d2, x, agents, ks);
    EXPECT_LT((lhs - rhs).norm(), 1e-12);
  }
}

TEST(FieldG, Examples) {
  const KernelSet ks;
  EXPECT_EQ(field_G(Points{Vec2(0.3, 0.1)}, ks)[0], Vec2::Zero());
  const Points two{Vec2(0.0, 0.0), Vec2(0.05, 0.02)};
  const Points g2 = field_G(two, ks);
  EXPECT_EQ(g2[0], -g2[1]);
  EXPECT_GT(g2[0].dot(two[1] - two[0]), 0.0);
  const Points same{Vec2(0.4, 0.4), Vec2(0.4, 0.4), Vec2(0.4, 0.4)};
  for (const Vec2& v : field_G(same, ks)) EXPECT_EQ(v, Vec2::Zero());
}

}  // namespace
}  // namespace mfsteer
