#include "mfsteer/adjoint.hpp"

#include <cmath>

namespace mfsteer {

AdjointState terminal_adjoint(std::span<const Vec2> terminal_positions, const SplitPlane& plane,
                              const TargetMeasure& target, std::size_t n_agents) {
  AdjointState out;
  out.p.reserve(terminal_positions.size());
  for (const auto& x : terminal_positions) out.p.push_back(x - target.atoms[assign_side(x, plane)]);
  out.q.assign(n_agents, Vec2::Zero());
  return out;
}

AdjointState adjoint_rhs(const AdjointState& state, const AdjointSnapshot& snapshot, const KernelSet& ks) {
  const std::size_t n = snapshot.positions.size();
  const std::size_t m_count = snapshot.agents.size();
  if (state.p.size() != n || state.q.size() != m_count || snapshot.weights.size() != n) {
    throw ConfigError("adjoint_rhs: state and snapshot sizes differ");
  }
  const auto& x = snapshot.positions;
  const auto& w = snapshot.weights;
  const auto& y = snapshot.agents;
  const auto& p = state.p;
  const auto& q = state.q;
  const double inv_m = 1.0 / static_cast<double>(m_count);

  AdjointState rhs{Points(n, Vec2::Zero()), Points(m_count, Vec2::Zero())};

  // Population coupling. The two DK integrals combine into
  //   sum_j w_j DK(x_j - x_i)^T (p_j - p_i);
  // DK is even and symmetric, so each unordered pair is evaluated once.
  const double ca = ks.attract_mu.k;
  const double cr = ks.repel_mu.k;
  const double ia = 1.0 / (2.0 * ks.attract_mu.sigma * ks.attract_mu.sigma);
  const double ir = 1.0 / (2.0 * ks.repel_mu.sigma * ks.repel_mu.sigma);
  const double sa = ca / (ks.attract_mu.sigma * ks.attract_mu.sigma);
  const double sr = cr / (ks.repel_mu.sigma * ks.repel_mu.sigma);
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 acc_i = Vec2::Zero();
    for (std::size_t j = i + 1; j < n; ++j) {
      const double zx = x[j].x() - x[i].x();
      const double zy = x[j].y() - x[i].y();
      const double d2 = zx * zx + zy * zy;
      const double ea = std::exp(-d2 * ia);
      const double er = std::exp(-d2 * ir);
      // DK = -(h_a I + s_a zz^T) + (h_r I + s_r zz^T) with h = -k e, s = (k / sigma^2) e.
      const double diag = ca * ea - cr * er;
      const double outer = -sa * ea + sr * er;
      const double dpx = p[j].x() - p[i].x();
      const double dpy = p[j].y() - p[i].y();
      const double zdp = zx * dpx + zy * dpy;
      const double jx = diag * dpx + outer * zx * zdp;
      const double jy = diag * dpy + outer * zy * zdp;
      acc_i.x() += w[j] * jx;
      acc_i.y() += w[j] * jy;
      rhs.p[j].x() -= w[i] * jx;
      rhs.p[j].y() -= w[i] * jy;
    }
    rhs.p[i] += acc_i;
  }

  // Agents acting on the population, and its back-reaction on q.
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 push = Vec2::Zero();
    for (std::size_t m = 0; m < m_count; ++m) {
      const Vec2 t = jacobian_f(y[m] - x[i], ks).transpose() * p[i];
      push += t;
      rhs.q[m] += (inv_m * w[i]) * t;
    }
    rhs.p[i] -= inv_m * push;
  }

  for (std::size_t m = 0; m < m_count; ++m) {
    Vec2 acc = Vec2::Zero();
    for (std::size_t j = 0; j < m_count; ++j) {
      if (j != m) acc += jacobian_g(y[j] - y[m], ks).transpose() * (q[j] - q[m]);
    }
    rhs.q[m] += inv_m * acc;
  }
  return rhs;
}

AdjointTrajectory solve_adjoint(const LagrangianPath& path, const AdjointState& terminal, const KernelSet& ks) {
  const std::size_t n_steps = path.n_steps();
  if (terminal.p.size() != path.weights.size()) {
    throw ConfigError("solve_adjoint: terminal state has " + std::to_string(terminal.p.size()) +
                      " nodes, forward cloud has " + std::to_string(path.weights.size()));
  }
  if (terminal.q.size() != path.agents.back().size()) {
    throw ConfigError("solve_adjoint: terminal state has wrong agent count");
  }
  AdjointTrajectory out;
  out.times.resize(n_steps + 1);
  out.states.resize(n_steps + 1);
  for (std::size_t n = 0; n <= n_steps; ++n) out.times[n] = static_cast<double>(n) * path.dt;
  out.states[n_steps] = terminal;

  for (std::size_t n = n_steps; n > 0; --n) {
    const AdjointState& cur = out.states[n];
    const AdjointSnapshot snap{path.positions[n], path.weights, path.agents[n]};
    const AdjointState rhs = adjoint_rhs(cur, snap, ks);
    AdjointState prev = cur;
    for (std::size_t i = 0; i < prev.p.size(); ++i) prev.p[i] += path.dt * rhs.p[i];
    for (std::size_t m = 0; m < prev.q.size(); ++m) prev.q[m] += path.dt * rhs.q[m];
    for (const auto& v : prev.q) {
      if (!v.allFinite()) throw NumericalError("solve_adjoint: non-finite costate at step " + std::to_string(n - 1));
    }
    out.states[n - 1] = std::move(prev);
  }
  return out;
}

AdjointTrajectory solve_adjoint(const ForwardTrajectory& forward, const AdjointState& terminal, const KernelSet& ks) {
  return solve_adjoint(forward.path, terminal, ks);
}

ControlTrajectory gradient_of_cost(const AdjointTrajectory& adjoint) {
  const std::size_t n_steps = adjoint.n_steps();
  const std::size_t m_count = adjoint.states.front().q.size();
  ControlTrajectory g(n_steps, m_count);
  for (std::size_t n = 0; n < n_steps; ++n) {
    for (std::size_t m = 0; m < m_count; ++m) g.at(n, m) = adjoint.states[n].q[m];
  }
  return g;
}

}  // namespace mfsteer
