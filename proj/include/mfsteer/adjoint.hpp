#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mfsteer/control.hpp"
#include "mfsteer/forward.hpp"
#include "mfsteer/kernels.hpp"
#include "mfsteer/transport.hpp"

namespace mfsteer {

/// Costates: p per tracer node, q per controlled agent.
struct AdjointState {
  Points p;
  Points q;
};

struct AdjointTrajectory {
  std::vector<double> times;
  std::vector<AdjointState> states;  // aligned with the forward time points

  std::size_t n_steps() const { return states.size() - 1; }
};

/// p_i = Phi(T, x_i) - z_{side(Phi(T, x_i))}, q = 0.
AdjointState terminal_adjoint(std::span<const Vec2> terminal_positions, const SplitPlane& plane,
                              const TargetMeasure& target, std::size_t n_agents);

/// Forward data at one time point, as seen by the adjoint right-hand side.
struct AdjointSnapshot {
  std::span<const Vec2> positions;  // Phi(t, x_i)
  std::span<const double> weights;  // mu_0 quadrature
  std::span<const Vec2> agents;     // y(t)
};

/// Returns (-dp/dt, -dq/dt). All integrals against mu(t) and mu_0 are sums
/// over the tracer nodes, using mu(t) = Phi(t)_# mu_0.
AdjointState adjoint_rhs(const AdjointState& state, const AdjointSnapshot& snapshot, const KernelSet& ks);

/// Explicit backward sweep state(t - dt) = state(t) + dt * rhs(t).
AdjointTrajectory solve_adjoint(const LagrangianPath& path, const AdjointState& terminal, const KernelSet& ks);
AdjointTrajectory solve_adjoint(const ForwardTrajectory& forward, const AdjointState& terminal, const KernelSet& ks);

/// Gradient of the cost with respect to the control: value at step n is q(t_n).
ControlTrajectory gradient_of_cost(const AdjointTrajectory& adjoint);

}  // namespace mfsteer
