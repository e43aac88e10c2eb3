#pragma once

#include <cstddef>

#include "mfsteer/adjoint.hpp"
#include "mfsteer/control.hpp"
#include "mfsteer/forward.hpp"
#include "mfsteer/geometry.hpp"
#include "mfsteer/kernels.hpp"
#include "mfsteer/transport.hpp"

namespace mfsteer {

/// Everything that defines J(u) = 1/2 W_2^2(mu(T; u), target).
struct SteeringProblem {
  Grid grid;
  KernelSet kernels;
  DensityField initial_density;
  AgentState initial_agents;
  TargetMeasure target;
  double dt = 0.005;
  double horizon = 1.5;
  double mass_threshold = 0.0;

  std::size_t n_steps() const { return step_count(horizon, dt); }
  std::size_t n_agents() const { return initial_agents.size(); }
  ControlTrajectory zero_control() const { return ControlTrajectory::zeros(n_steps(), n_agents()); }
};

/// Cost and adjoint gradient of a steering problem. Holds the precomputed
/// field tables, so reuse one instance across evaluations.
class SteeringObjective {
 public:
  explicit SteeringObjective(SteeringProblem problem);

  struct Evaluation {
    ForwardTrajectory forward;
    TerminalCost terminal;
  };

  struct Gradient {
    AdjointTrajectory adjoint;
    ControlTrajectory q;
  };

  const SteeringProblem& problem() const { return problem_; }

  Evaluation evaluate(const ControlTrajectory& control) const;
  double cost(const ControlTrajectory& control) const { return evaluate(control).terminal.cost; }
  Gradient gradient(const Evaluation& evaluation) const;

 private:
  SteeringProblem problem_;
  ForwardSolver solver_;
};

}  // namespace mfsteer
