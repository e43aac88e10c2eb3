#include "mfsteer/control.hpp"

#include <algorithm>
#include <cmath>

namespace mfsteer {
namespace {

void require_same_shape(const ControlTrajectory& a, const ControlTrajectory& b) {
  if (!a.same_shape(b)) throw ConfigError("control trajectories differ in shape");
}

}  // namespace

std::vector<Vec2> ControlTrajectory::step_values(std::size_t step) const {
  const auto first = values_.begin() + static_cast<std::ptrdiff_t>(step * n_agents_);
  return {first, first + static_cast<std::ptrdiff_t>(n_agents_)};
}

double ControlTrajectory::max_norm() const {
  double out = 0.0;
  for (const auto& v : values_) out = std::max(out, v.norm());
  return out;
}

double l2_inner(const ControlTrajectory& a, const ControlTrajectory& b, double dt) {
  require_same_shape(a, b);
  double acc = 0.0;
  for (std::size_t k = 0; k < a.values().size(); ++k) acc += a.values()[k].dot(b.values()[k]);
  return dt * acc;
}

double l2_norm(const ControlTrajectory& a, double dt) { return std::sqrt(l2_inner(a, a, dt)); }

ControlTrajectory operator+(const ControlTrajectory& a, const ControlTrajectory& b) {
  require_same_shape(a, b);
  ControlTrajectory out = a;
  for (std::size_t k = 0; k < out.values().size(); ++k) out.values()[k] += b.values()[k];
  return out;
}

ControlTrajectory operator-(const ControlTrajectory& a, const ControlTrajectory& b) {
  require_same_shape(a, b);
  ControlTrajectory out = a;
  for (std::size_t k = 0; k < out.values().size(); ++k) out.values()[k] -= b.values()[k];
  return out;
}

ControlTrajectory operator*(double s, const ControlTrajectory& a) {
  ControlTrajectory out = a;
  for (auto& v : out.values()) v *= s;
  return out;
}

}  // namespace mfsteer
