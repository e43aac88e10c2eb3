#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mfsteer/control.hpp"
#include "mfsteer/field.hpp"
#include "mfsteer/geometry.hpp"
#include "mfsteer/kernels.hpp"

namespace mfsteer {

/// Tracer positions and agent positions at every time point, which is all
/// the backward sweep needs from a forward solve.
struct LagrangianPath {
  double dt = 0.0;
  std::vector<double> weights;  // mu_0 quadrature weights, fixed in time
  Points origins;
  std::vector<Points> positions;  // [step][node]
  std::vector<Points> agents;     // [step][agent]

  std::size_t n_steps() const { return positions.empty() ? 0 : positions.size() - 1; }
};

struct ForwardTrajectory {
  std::vector<double> times;
  std::vector<DensityField> densities;
  LagrangianPath path;
  std::vector<double> courant;  // one entry per step
  double courant_max = 0.0;
  double boundary_mass_max = 0.0;
  std::vector<std::string> warnings;

  std::size_t n_steps() const { return times.size() - 1; }
  LagrangianCloud cloud(std::size_t step) const;
  AgentState agents(std::size_t step) const { return {path.agents[step]}; }
  const DensityField& terminal_density() const { return densities.back(); }
};

struct FvStepResult {
  DensityField density;
  double courant = 0.0;
};

/// One conservative finite-volume step with the local Lax-Friedrichs face
/// flux. Throws InstabilityError when the Courant number exceeds one.
FvStepResult fv_step(const GridFieldEvaluator& field, const DensityField& density, std::span<const Vec2> agents,
                     double dt, std::ptrdiff_t step_index = -1);
FvStepResult fv_step(const DensityField& density, std::span<const Vec2> agents, const KernelSet& ks, double dt);

/// Same update from precomputed lattice velocities.
FvStepResult fv_step(const DensityField& density, const LatticeVelocity& velocity, double dt,
                     std::ptrdiff_t step_index = -1);

LagrangianCloud advect_cloud(const LagrangianCloud& cloud, const DensityField& density, std::span<const Vec2> agents,
                             const KernelSet& ks, double dt);

AgentState step_agents(const AgentState& agents, std::span<const Vec2> control_value, const KernelSet& ks, double dt);

/// Number of steps T / dt; throws when the ratio is not integral within 1e-9.
std::size_t step_count(double T, double dt);

/// Mass in the outermost ring of cells.
double boundary_mass(const DensityField& density);

struct ForwardOptions {
  double mass_threshold = 0.0;        // tracer extraction threshold
  double boundary_mass_warning = 1e-8;
};

class ForwardSolver {
 public:
  ForwardSolver(const Grid& grid, const KernelSet& kernels, double dt, ForwardOptions options = {});

  ForwardTrajectory solve(const DensityField& initial_density, const AgentState& initial_agents,
                          const ControlTrajectory& control) const;

  const GridFieldEvaluator& field() const { return field_; }
  double dt() const { return dt_; }

 private:
  GridFieldEvaluator field_;
  double dt_;
  ForwardOptions options_;
};

ForwardTrajectory solve_forward(const DensityField& initial_density, const AgentState& initial_agents,
                                const ControlTrajectory& control, const KernelSet& ks, double dt, double T);

}  // namespace mfsteer
