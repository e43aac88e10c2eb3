#pragma once

#include <cstddef>
#include <vector>

#include "mfsteer/types.hpp"

namespace mfsteer {

/// Piecewise-constant per-agent control: values(step, agent) acts on
/// [t_step, t_step + dt). Also used for gradients, which share its shape.
class ControlTrajectory {
 public:
  ControlTrajectory() = default;
  ControlTrajectory(std::size_t n_steps, std::size_t n_agents)
      : n_steps_(n_steps), n_agents_(n_agents), values_(n_steps * n_agents, Vec2::Zero()) {}

  static ControlTrajectory zeros(std::size_t n_steps, std::size_t n_agents) { return {n_steps, n_agents}; }

  std::size_t n_steps() const { return n_steps_; }
  std::size_t n_agents() const { return n_agents_; }
  bool same_shape(const ControlTrajectory& other) const {
    return n_steps_ == other.n_steps_ && n_agents_ == other.n_agents_;
  }

  Vec2& at(std::size_t step, std::size_t agent) { return values_[step * n_agents_ + agent]; }
  const Vec2& at(std::size_t step, std::size_t agent) const { return values_[step * n_agents_ + agent]; }
  /// All agents' values at one step.
  std::vector<Vec2> step_values(std::size_t step) const;

  std::vector<Vec2>& values() { return values_; }
  const std::vector<Vec2>& values() const { return values_; }

  /// Largest per-agent Euclidean norm over all steps.
  double max_norm() const;

 private:
  std::size_t n_steps_ = 0;
  std::size_t n_agents_ = 0;
  std::vector<Vec2> values_;
};

/// Step-weighted discrete L2 inner product sum_n dt sum_m a_nm . b_nm.
double l2_inner(const ControlTrajectory& a, const ControlTrajectory& b, double dt);
double l2_norm(const ControlTrajectory& a, double dt);

ControlTrajectory operator+(const ControlTrajectory& a, const ControlTrajectory& b);
ControlTrajectory operator-(const ControlTrajectory& a, const ControlTrajectory& b);
ControlTrajectory operator*(double s, const ControlTrajectory& a);

}  // namespace mfsteer
