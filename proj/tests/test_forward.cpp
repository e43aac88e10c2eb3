#include <gtest/gtest.h>

#include <cmath>

#include "mfsteer/forward.hpp"
#include "mfsteer/optimizer.hpp"
#include "mfsteer/transport.hpp"
#include "mfsteer/problem.hpp"
#include "support.hpp"

namespace mfsteer {
namespace {

Vec2 center_of_mass(const DensityField& d) {
  const Grid& g = d.grid();
  Vec2 c = Vec2::Zero();
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) c += d.mass_at(i, j) * g.cell_center(i, j);
  }
  return c;
}

LatticeVelocity constant_velocity(const Grid& g, const Vec2& v) {
  LatticeVelocity out;
  out.vx_center = Eigen::MatrixXd::Constant(g.ny, g.nx, v.x());
  out.vy_center = Eigen::MatrixXd::Constant(g.ny, g.nx, v.y());
  out.vx_xface = Eigen::MatrixXd::Constant(g.ny, g.nx + 1, v.x());
  out.vy_yface = Eigen::MatrixXd::Constant(g.ny + 1, g.nx, v.y());
  return out;
}

TEST(FvStep, ZeroFieldLeavesDensityUnchanged) {
  const Grid g = build_grid(-1, 1, -1, 1, 0.1);
  const DensityField d = truncated_gaussian_density(g, 1.2, 0.6);
  const FvStepResult r = fv_step(d, {}, KernelSet::zero(), 0.01);
  EXPECT_EQ(r.courant, 0.0);
  for (std::size_t k = 0; k < g.cell_count(); ++k) EXPECT_EQ(r.density.mass()[k], d.mass()[k]);
}

TEST(FvStep, ConservesMass) {
  const Grid g = build_grid(-2.5, 2.5, -2.5, 2.5, 0.1);
  DensityField d = truncated_gaussian_density(g, 1.2, 0.8);
  const Points agents{Vec2(0.3, 0.0), Vec2(-0.5, 0.2)};
  const GridFieldEvaluator field(g, KernelSet{});
  for (int n = 0; n < 20; ++n) {
    FvStepResult r = fv_step(field, d, agents, 0.01, n);
    EXPECT_NEAR(r.density.total_mass(), d.total_mass(), 1e-12);
    for (double m : r.density.mass()) EXPECT_GE(m, 0.0);
    d = std::move(r.density);
  }
}

TEST(FvStep, ConstantVelocityShiftsCenterOfMass) {
  const Grid g = build_grid(-1.5, 1.5, -1.5, 1.5, 0.1);
  const DensityField d = truncated_gaussian_density(g, 0.5, 0.8);
  const double dt = 0.01;
  for (const Vec2 v : {Vec2(4.0, 0.0), Vec2(-3.0, 0.0), Vec2(2.0, -1.5)}) {
    const FvStepResult r = fv_step(d, constant_velocity(g, v), dt);
    EXPECT_LE(r.courant, 0.5);
    for (double m : r.density.mass()) EXPECT_GE(m, 0.0);
    EXPECT_LT((center_of_mass(r.density) - center_of_mass(d) - dt * v).norm(), 1e-12);
  }
}

TEST(FvStep, CourantAboveOneThrows) {
  const Grid g = build_grid(-1, 1, -1, 1, 0.1);
  const DensityField d = truncated_gaussian_density(g, 1.0, 0.5);
  EXPECT_THROW(fv_step(d, constant_velocity(g, Vec2(8.0, 8.0)), 0.01, 7), InstabilityError);
  try {
    fv_step(d, constant_velocity(g, Vec2(8.0, 8.0)), 0.01, 7);
  } catch (const InstabilityError& e) {
    EXPECT_NE(std::string(e.what()).find("7"), std::string::npos);
  }
}

TEST(FvStep, OutflowLeavesThroughBoundary) {
  const Grid g = build_grid(0, 1, 0, 1, 0.25);
  std::vector<double> w(g.cell_count(), 0.0);
  w[g.index(3, 1)] = 1.0;
  const FvStepResult r = fv_step(DensityField::from_masses(g, w), constant_velocity(g, Vec2(1.0, 0.0)), 0.05);
  EXPECT_NEAR(r.density.total_mass(), 0.8, 1e-15);
}

TEST(AdvectCloud, ZeroAndConstantField) {
  const Grid g = build_grid(-1, 1, -1, 1, 0.5);
  const DensityField d = DensityField::normalized(g, std::vector<double>(16, 1.0));
  LagrangianCloud cloud{{Vec2(0.1, 0.2)}, {Vec2(0.1, 0.2)}, {1.0}};
  const LagrangianCloud same = advect_cloud(cloud, d, {}, KernelSet::zero(), 0.1);
  EXPECT_EQ(same.positions, cloud.positions);

  KernelSet ks = KernelSet::zero();
  ks.leader_repel = {5.0, 1e6};  // f(z) ~ -5 z over this range
  const Points agent{Vec2(0.1, 1.2)};
  const LagrangianCloud moved = advect_cloud(cloud, d, agent, ks, 0.1);
  EXPECT_LT((moved.positions[0] - (cloud.positions[0] + 0.1 * kernel_f(agent[0] - cloud.positions[0], ks))).norm(),
            1e-15);
  EXPECT_EQ(moved.origins, cloud.origins);
  EXPECT_EQ(moved.weights, cloud.weights);
}

TEST(StepAgents, Examples) {
  const KernelSet ks;
  const AgentState one{{Vec2(0.5, 0.5)}};
  const Points zero{Vec2::Zero()};
  EXPECT_EQ(step_agents(one, zero, ks, 0.01).positions, one.positions);

  const Points u{Vec2(1.0, -0.5)};
  EXPECT_EQ(step_agents(one, u, KernelSet::zero(), 0.1).positions[0], Vec2(0.6, 0.45));

  const AgentState two{{Vec2(0.0, 0.0), Vec2(0.07, 0.03)}};
  const Points zeros{Vec2::Zero(), Vec2::Zero()};
  const AgentState next = step_agents(two, zeros, ks, 0.01);
  const Vec2 mid0 = 0.5 * (two.positions[0] + two.positions[1]);
  const Vec2 mid1 = 0.5 * (next.positions[0] + next.positions[1]);
  EXPECT_LT((mid0 - mid1).norm(), 1e-12);
  EXPECT_LT((next.positions[1] - next.positions[0]).norm(), (two.positions[1] - two.positions[0]).norm());

  EXPECT_THROW(step_agents(two, zero, ks, 0.01), ConfigError);
}

TEST(StepCount, IntegralRatio) {
  EXPECT_EQ(step_count(1.5, 0.005), 300u);
  EXPECT_EQ(step_count(1.5, 0.004), 375u);
  EXPECT_EQ(step_count(0.0, 0.01), 0u);
  EXPECT_THROW(step_count(1.0, 0.3), ConfigError);
  EXPECT_THROW(step_count(1.0, 0.0), ConfigError);
}

TEST(SolveForward, ZeroHorizon) {
  const SteeringProblem p = testing::small_config().make_problem();
  const ForwardTrajectory t = solve_forward(p.initial_density, p.initial_agents, ControlTrajectory::zeros(0, 2),
                                            p.kernels, 0.01, 0.0);
  EXPECT_EQ(t.times.size(), 1u);
  EXPECT_EQ(t.densities.size(), 1u);
  EXPECT_EQ(t.path.positions[0], t.path.origins);
}

TEST(SolveForward, ControlShapeMismatchThrows) {
  const SteeringProblem p = testing::small_config().make_problem();
  EXPECT_THROW(
      solve_forward(p.initial_density, p.initial_agents, ControlTrajectory::zeros(5, 2), p.kernels, 0.01, 0.3),
      ConfigError);
}

TEST(SolveForward, StoresEveryStepAndConservesMass) {
  const SteeringProblem p = testing::small_config().make_problem();
  ControlTrajectory u = p.zero_control();
  for (std::size_t n = 0; n < u.n_steps(); ++n) u.at(n, 0) = Vec2(0.8, 0.1);
  const ForwardTrajectory t = ForwardSolver(p.grid, p.kernels, p.dt).solve(p.initial_density, p.initial_agents, u);
  ASSERT_EQ(t.times.size(), 31u);
  EXPECT_EQ(t.densities.size(), 31u);
  EXPECT_EQ(t.path.positions.size(), 31u);
  EXPECT_EQ(t.path.agents.size(), 31u);
  EXPECT_EQ(t.courant.size(), 30u);
  EXPECT_NEAR(t.times.back(), 0.3, 1e-12);
  for (const auto& d : t.densities) EXPECT_NEAR(d.total_mass(), 1.0, 1e-12);
  EXPECT_LE(t.courant_max, 1.0);
  EXPECT_EQ(t.path.agents[0], p.initial_agents.positions);
}

TEST(SolveForward, Deterministic) {
  const SteeringProblem p = testing::small_config().make_problem();
  const ForwardSolver solver(p.grid, p.kernels, p.dt);
  const ControlTrajectory u = 0.5 * random_direction(p.n_steps(), p.n_agents(), 3);
  const ForwardTrajectory a = solver.solve(p.initial_density, p.initial_agents, u);
  const ForwardTrajectory b = solver.solve(p.initial_density, p.initial_agents, u);
  for (std::size_t n = 0; n < a.densities.size(); ++n) {
    ASSERT_TRUE(std::equal(a.densities[n].mass().begin(), a.densities[n].mass().end(),
                           b.densities[n].mass().begin()));
  }
  EXPECT_EQ(a.path.positions, b.path.positions);
  EXPECT_EQ(a.path.agents, b.path.agents);
}

TEST(SolveForward, TranslationEquivariance) {
  ProblemConfig cfg = testing::small_config();
  cfg.grid = {-2.0, 2.0, -2.0, 2.0, 0.1};
  const SteeringProblem base = cfg.make_problem();
  const int si = 2, sj = -1;
  const Vec2 shift(si * 0.1, sj * 0.1);
  const DensityField shifted_density =
      truncated_gaussian_density(base.grid, cfg.density_std, cfg.density_radius, shift);
  AgentState shifted_agents = base.initial_agents;
  for (auto& y : shifted_agents.positions) y += shift;

  const ControlTrajectory u = 0.5 * random_direction(base.n_steps(), base.n_agents(), 4);
  const ForwardSolver solver(base.grid, base.kernels, base.dt);
  const ForwardTrajectory a = solver.solve(base.initial_density, base.initial_agents, u);
  const ForwardTrajectory b = solver.solve(shifted_density, shifted_agents, u);

  const Grid& g = base.grid;
  for (std::size_t n = 0; n < a.densities.size(); n += 5) {
    double err = 0.0;
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        const int i2 = i + si, j2 = j + sj;
        const double mb = (i2 < 0 || j2 < 0 || i2 >= g.nx || j2 >= g.ny) ? 0.0 : b.densities[n].mass_at(i2, j2);
        err = std::max(err, std::abs(a.densities[n].mass_at(i, j) - mb));
      }
    }
    EXPECT_LT(err, 1e-9) << "step " << n;
    for (std::size_t m = 0; m < base.n_agents(); ++m) {
      EXPECT_LT((a.path.agents[n][m] + shift - b.path.agents[n][m]).norm(), 1e-9);
    }
  }
  TargetMeasure shifted_target = base.target;
  for (auto& z : shifted_target.atoms) z += shift;
  EXPECT_NEAR(terminal_cost(a.terminal_density(), base.target),
              terminal_cost(b.terminal_density(), shifted_target), 1e-9);
}

TEST(SolveForward, BoundaryMassWarning) {
  ProblemConfig cfg = testing::small_config();
  cfg.grid = {-1.0, 1.0, -1.0, 1.0, 0.1};
  cfg.density_radius = 0.85;
  const SteeringProblem p = cfg.make_problem();
  const ForwardTrajectory t =
      ForwardSolver(p.grid, p.kernels, p.dt).solve(p.initial_density, p.initial_agents, p.zero_control());
  EXPECT_GT(t.boundary_mass_max, 1e-8);
}

TEST(SolveForward, ExplodingFieldRaisesInstability) {
  ProblemConfig cfg = testing::small_config();
  cfg.kernels.leader_repel = {2000.0, 0.5};
  const SteeringProblem p = cfg.make_problem();
  EXPECT_THROW(ForwardSolver(p.grid, p.kernels, p.dt).solve(p.initial_density, p.initial_agents, p.zero_control()),
               InstabilityError);
}

TEST(SolveForward, CloudTracksDensityCenterOfMass) {
  const SteeringProblem p = testing::case_study_config().make_problem();
  const ForwardTrajectory t =
      ForwardSolver(p.grid, p.kernels, p.dt).solve(p.initial_density, p.initial_agents, p.zero_control());
  ASSERT_EQ(t.n_steps(), 300u);
  Vec2 cloud_com = Vec2::Zero();
  const auto& last = t.path.positions.back();
  for (std::size_t i = 0; i < last.size(); ++i) cloud_com += t.path.weights[i] * last[i];
  EXPECT_LT((cloud_com - center_of_mass(t.terminal_density())).norm(), 0.05);
}

}  // namespace
}  // namespace mfsteer
