#include "mfsteer/optimizer.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <random>

namespace mfsteer {

void OptimizerConfig::validate() const {
  if (!(step_size > 0.0)) throw ConfigError("optimizer.step_size must be > 0");
  if (!(u_max > 0.0)) throw ConfigError("optimizer.u_max must be > 0");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw ConfigError("optimizer.armijo_c must lie in (0, 1)");
  if (!(armijo_beta > 0.0 && armijo_beta < 1.0)) throw ConfigError("optimizer.armijo_beta must lie in (0, 1)");
  if (!(cost_tolerance >= 0.0)) throw ConfigError("optimizer.cost_tolerance must be >= 0");
}

ControlTrajectory project_control(const ControlTrajectory& control, double u_max) {
  ControlTrajectory out = control;
  for (auto& v : out.values()) {
    const double norm = v.norm();
    if (norm > u_max) v *= u_max / norm;
  }
  return out;
}

ControlTrajectory normalize_gradient_agentwise(const ControlTrajectory& gradient, double dt) {
  ControlTrajectory out = gradient;
  for (std::size_t m = 0; m < out.n_agents(); ++m) {
    double sq = 0.0;
    for (std::size_t n = 0; n < out.n_steps(); ++n) sq += out.at(n, m).squaredNorm();
    const double norm = std::sqrt(dt * sq);
    for (std::size_t n = 0; n < out.n_steps(); ++n) {
      if (norm > 1e-12) {
        out.at(n, m) /= norm;
      } else {
        out.at(n, m).setZero();
      }
    }
  }
  return out;
}

double pmp_residual(const ControlTrajectory& q, const ControlTrajectory& control, double u_max, double dt) {
  if (!q.same_shape(control)) throw ConfigError("pmp_residual: shapes differ");
  double gap_sq = 0.0;
  double min_sq = 0.0;
  for (std::size_t n = 0; n < q.n_steps(); ++n) {
    double a = 0.0;
    double b = 0.0;
    for (std::size_t m = 0; m < q.n_agents(); ++m) {
      a += q.at(n, m).dot(control.at(n, m));
      b -= u_max * q.at(n, m).norm();
    }
    gap_sq += (a - b) * (a - b);
    min_sq += b * b;
  }
  return std::sqrt(dt * gap_sq) / std::max(std::sqrt(dt * min_sq), 1e-12);
}

ControlTrajectory pointwise_minimizer(const ControlTrajectory& q, double u_max) {
  ControlTrajectory out(q.n_steps(), q.n_agents());
  for (std::size_t k = 0; k < q.values().size(); ++k) {
    const double norm = q.values()[k].norm();
    if (norm > 0.0) out.values()[k] = -u_max * q.values()[k] / norm;
  }
  return out;
}

ArmijoResult armijo_step(const CostFunction& cost_fn, const ControlTrajectory& control, double current_cost,
                         const ControlTrajectory& raw_gradient, const ControlTrajectory& direction,
                         const OptimizerConfig& config, double dt) {
  ArmijoResult result;
  double step = config.step_size;
  for (std::size_t k = 0; k <= config.max_backtracks; ++k, step *= config.armijo_beta) {
    ControlTrajectory candidate = project_control(control - step * direction, config.u_max);
    const double cost = cost_fn(candidate);
    if (!std::isfinite(cost)) throw NumericalError("armijo: non-finite cost at trial step " + std::to_string(step));
    const double decrease = config.armijo_c * step * l2_inner(raw_gradient, control - candidate, dt);
    if (cost <= current_cost - decrease) {
      result.control = std::move(candidate);
      result.cost = cost;
      result.backtracks = k;
      result.step = step;
      return result;
    }
  }
  result.control = control;
  result.cost = current_cost;
  result.backtracks = config.max_backtracks;
  result.step = 0.0;
  result.stalled = true;
  return result;
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::kMaxIterations:
      return "max_iterations";
    case StopReason::kCostTolerance:
      return "cost_tolerance";
    case StopReason::kStalled:
      return "stalled";
  }
  return "unknown";
}

OptimizationResult optimize(const SteeringObjective& objective, const ControlTrajectory& initial_control,
                            const OptimizerConfig& config, const IterationCallback& on_iteration) {
  config.validate();
  const double dt = objective.problem().dt;
  if (initial_control.max_norm() > config.u_max + 1e-12) {
    throw ConfigError("initial control violates u_max = " + std::to_string(config.u_max));
  }

  OptimizationResult result;
  result.control = initial_control;
  SteeringObjective::Evaluation current = objective.evaluate(result.control);

  // The accepted Armijo candidate is always the last one evaluated; keep its
  // forward solve so the next gradient does not need to recompute it.
  std::optional<SteeringObjective::Evaluation> last;
  const CostFunction cost_fn = [&](const ControlTrajectory& u) {
    last = objective.evaluate(u);
    return last->terminal.cost;
  };

  for (std::size_t iter = 0; iter < config.max_iters; ++iter) {
    const SteeringObjective::Gradient grad = objective.gradient(current);
    const ControlTrajectory direction =
        config.normalize_gradient ? normalize_gradient_agentwise(grad.q, dt) : grad.q;

    IterationRecord record;
    record.iter = iter;
    record.cost = current.terminal.cost;
    record.pmp_residual = pmp_residual(grad.q, result.control, config.u_max, dt);

    ArmijoResult step = armijo_step(cost_fn, result.control, current.terminal.cost, grad.q, direction, config, dt);
    record.backtracks = step.backtracks;
    record.step_used = step.step;
    result.history.push_back(record);
    if (on_iteration) on_iteration(record);

    if (step.stalled) {
      result.stop_reason = StopReason::kStalled;
      break;
    }
    const double change = std::abs(current.terminal.cost - step.cost);
    result.control = std::move(step.control);
    current = std::move(*last);
    last.reset();
    if (change < config.cost_tolerance) {
      result.stop_reason = StopReason::kCostTolerance;
      break;
    }
  }
  result.final_cost = current.terminal.cost;
  result.final_evaluation = std::move(current);
  return result;
}

double GradientCheckReport::max_relative_error() const {
  double out = 0.0;
  for (const auto& e : entries) out = std::max(out, e.relative_error);
  return out;
}

GradientCheckReport gradient_check(const SteeringObjective& objective, const ControlTrajectory& control,
                                   const ControlTrajectory& direction, const std::vector<double>& epsilons) {
  const double dt = objective.problem().dt;
  const SteeringObjective::Evaluation base = objective.evaluate(control);
  const SteeringObjective::Gradient grad = objective.gradient(base);
  const double adjoint = l2_inner(grad.q, direction, dt);

  GradientCheckReport report;
  for (double eps : epsilons) {
    GradientCheckEntry e;
    e.epsilon = eps;
    e.adjoint = adjoint;
    const double plus = objective.cost(control + eps * direction);
    const double minus = objective.cost(control - eps * direction);
    e.finite_difference = (plus - minus) / (2.0 * eps);
    const double scale = std::abs(e.finite_difference);
    const double diff = std::abs(e.finite_difference - e.adjoint);
    e.relative_error = diff == 0.0 ? 0.0 : diff / std::max(scale, 1e-300);
    report.entries.push_back(e);
  }
  return report;
}

ControlTrajectory random_direction(std::size_t n_steps, std::size_t n_agents, std::uint64_t seed,
                                   std::size_t n_modes) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng] { return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0; };
  ControlTrajectory out(n_steps, n_agents);
  for (std::size_t m = 0; m < n_agents; ++m) {
    for (int axis = 0; axis < 2; ++axis) {
      std::vector<double> coeff(n_modes);
      for (auto& c : coeff) c = uniform();
      for (std::size_t n = 0; n < n_steps; ++n) {
        const double s = (static_cast<double>(n) + 0.5) / static_cast<double>(n_steps);
        double v = 0.0;
        for (std::size_t k = 0; k < n_modes; ++k) v += coeff[k] * std::cos(std::numbers::pi * static_cast<double>(k) * s);
        out.at(n, m)[axis] = v;
      }
    }
  }
  const double peak = out.max_norm();
  return peak > 0.0 ? (1.0 / peak) * out : out;
}

}  // namespace mfsteer
