#include "mfsteer/problem.hpp"

namespace mfsteer {
namespace {

ForwardOptions forward_options(const SteeringProblem& p) {
  ForwardOptions o;
  o.mass_threshold = p.mass_threshold;
  return o;
}

}  // namespace

SteeringObjective::SteeringObjective(SteeringProblem problem)
    : problem_(std::move(problem)), solver_(problem_.grid, problem_.kernels, problem_.dt, forward_options(problem_)) {
  problem_.kernels.validate();
  problem_.target.validate();
  problem_.initial_agents.validate();
  (void)problem_.n_steps();
}

SteeringObjective::Evaluation SteeringObjective::evaluate(const ControlTrajectory& control) const {
  if (control.n_steps() != problem_.n_steps() || control.n_agents() != problem_.n_agents()) {
    throw ConfigError("control shape (" + std::to_string(control.n_steps()) + " x " +
                      std::to_string(control.n_agents()) + ") does not match the problem (" +
                      std::to_string(problem_.n_steps()) + " x " + std::to_string(problem_.n_agents()) + ")");
  }
  Evaluation e;
  e.forward = solver_.solve(problem_.initial_density, problem_.initial_agents, control);
  e.terminal = evaluate_terminal_cost(e.forward.terminal_density(), problem_.target);
  return e;
}

SteeringObjective::Gradient SteeringObjective::gradient(const Evaluation& evaluation) const {
  const auto& path = evaluation.forward.path;
  const AdjointState terminal =
      terminal_adjoint(path.positions.back(), evaluation.terminal.plane, problem_.target, problem_.n_agents());
  Gradient g;
  g.adjoint = solve_adjoint(path, terminal, problem_.kernels);
  g.q = gradient_of_cost(g.adjoint);
  return g;
}

}  // namespace mfsteer
