#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "mfsteer/control.hpp"
#include "mfsteer/problem.hpp"

namespace mfsteer {

struct OptimizerConfig {
  double step_size = 0.1;
  double u_max = 1.0;
  double armijo_c = 1e-4;
  double armijo_beta = 0.5;
  std::size_t max_backtracks = 20;
  std::size_t max_iters = 12;
  double cost_tolerance = 1e-5;
  bool normalize_gradient = true;

  void validate() const;
};

struct IterationRecord {
  std::size_t iter = 0;
  double cost = 0.0;          // J at the iterate, before the step
  double pmp_residual = 0.0;  // at the iterate
  std::size_t backtracks = 0;
  double step_used = 0.0;     // 0 when the line search stalled
};

/// Euclidean projection onto the product of per-agent balls of radius u_max.
ControlTrajectory project_control(const ControlTrajectory& control, double u_max);

/// Scales each agent's time trajectory to unit step-weighted L2 norm. Agents
/// whose norm is <= 1e-12 are set to zero.
ControlTrajectory normalize_gradient_agentwise(const ControlTrajectory& gradient, double dt);

/// Relative L2-in-time gap between sum_m q_m . u_m and its minimum over the
/// admissible set, -u_max sum_m |q_m|.
double pmp_residual(const ControlTrajectory& q, const ControlTrajectory& control, double u_max, double dt);

/// The pointwise minimizer of q . w over the balls: -u_max q_m / |q_m| (0 where q_m = 0).
ControlTrajectory pointwise_minimizer(const ControlTrajectory& q, double u_max);

struct ArmijoResult {
  ControlTrajectory control;
  double cost = 0.0;
  std::size_t backtracks = 0;
  double step = 0.0;
  bool stalled = false;
};

using CostFunction = std::function<double(const ControlTrajectory&)>;

/// Projected-gradient Armijo backtracking: candidate = P(u - s d) for
/// s = step_size * beta^k, accepted when
///   J(candidate) <= J(u) - c s <g, u - candidate>.
ArmijoResult armijo_step(const CostFunction& cost_fn, const ControlTrajectory& control, double current_cost,
                         const ControlTrajectory& raw_gradient, const ControlTrajectory& direction,
                         const OptimizerConfig& config, double dt);

enum class StopReason { kMaxIterations, kCostTolerance, kStalled };
std::string to_string(StopReason reason);

struct OptimizationResult {
  ControlTrajectory control;
  double final_cost = 0.0;
  std::vector<IterationRecord> history;
  StopReason stop_reason = StopReason::kMaxIterations;
  SteeringObjective::Evaluation final_evaluation;
};

using IterationCallback = std::function<void(const IterationRecord&)>;

/// Projected gradient descent on the control with adjoint gradients.
OptimizationResult optimize(const SteeringObjective& objective, const ControlTrajectory& initial_control,
                            const OptimizerConfig& config, const IterationCallback& on_iteration = {});

struct GradientCheckEntry {
  double epsilon = 0.0;
  double finite_difference = 0.0;
  double adjoint = 0.0;
  double relative_error = 0.0;
};

struct GradientCheckReport {
  std::vector<GradientCheckEntry> entries;
  double max_relative_error() const;
};

/// Central differences (J(u + e d) - J(u - e d)) / 2e against <q, d>. The
/// control is not projected, so pick interior controls.
GradientCheckReport gradient_check(const SteeringObjective& objective, const ControlTrajectory& control,
                                   const ControlTrajectory& direction, const std::vector<double>& epsilons);

/// Smooth random direction: per agent and axis, a few cosine modes in time
/// with coefficients uniform in [-1, 1], scaled to max pointwise norm 1.
ControlTrajectory random_direction(std::size_t n_steps, std::size_t n_agents, std::uint64_t seed,
                                   std::size_t n_modes = 4);

}  // namespace mfsteer
