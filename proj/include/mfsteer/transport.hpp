#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mfsteer/geometry.hpp"

namespace mfsteer {

/// Uniform discrete target (1/P) sum_i delta_{z_i}. The optimal-transport
/// pipeline supports P = 2.
struct TargetMeasure {
  Points atoms;

  void validate() const;
};

/// Half-plane split {normal . x < offset} -> atom 0, otherwise atom 1.
struct SplitPlane {
  Vec2 normal = Vec2::UnitX();
  double offset = 0.0;
  double mass_left = 0.0;
  double imbalance = 0.0;  // |mass_left - 1/2|
};

/// Locates the hyperplane orthogonal to z_1 - z_0 that splits the density
/// into two halves, classifying whole cells by their centers. Bisection on
/// the offset finds the jump of the mass-on-the-left step function; the
/// offset is then centered in the gap between consecutive cell projections.
SplitPlane bisect_split(const DensityField& density, const TargetMeasure& target);

/// 0 if normal . point < offset, else 1 (points on the plane go to atom 1).
std::size_t assign_side(const Vec2& point, const SplitPlane& plane);

struct TerminalCost {
  double cost = 0.0;
  SplitPlane plane;
};

/// 1/2 sum_c m_c |x_c - z_{side(x_c)}|^2 using the bisected split.
TerminalCost evaluate_terminal_cost(const DensityField& density, const TargetMeasure& target);
double terminal_cost(const DensityField& density, const TargetMeasure& target);

/// Balanced assignment of equal-weight points to the two atoms (0 or 1 per
/// point). For odd N the median point goes to atom 0.
std::vector<std::size_t> assign_particles_two_atoms(std::span<const Vec2> points, const TargetMeasure& target);

/// 1/2 (1/N) sum_n |x_n - z_{a(n)}|^2 with the balanced assignment.
double particle_terminal_cost(std::span<const Vec2> points, const TargetMeasure& target);

struct DiscreteMeasure {
  Points points;
  std::vector<double> weights;
};

/// Exact min over couplings of sum gamma_ij |x_i - y_j|^2 (no 1/2 factor) for
/// small measures (<= 8 source atoms, <= 4 target atoms) whose weights are
/// multiples of 1/D for some D <= 24. Integer margins give integral optimal
/// vertices, so an exhaustive search over unit splits is exact.
double brute_force_transport(const DiscreteMeasure& source, const DiscreteMeasure& target);

}  // namespace mfsteer
