#include "mfsteer/forward.hpp"

#include <cmath>
#include <sstream>

namespace mfsteer {

LagrangianCloud ForwardTrajectory::cloud(std::size_t step) const {
  return {path.positions[step], path.origins, path.weights};
}

FvStepResult fv_step(const DensityField& density, const LatticeVelocity& velocity, double dt,
                     std::ptrdiff_t step_index) {
  if (!(dt > 0.0)) throw ConfigError("fv_step: dt must be positive");
  const Grid& g = density.grid();
  const int nx = g.nx;
  const int ny = g.ny;
  const double lambda = dt / g.dx;

  double speed_max = 0.0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      speed_max = std::max(speed_max, std::abs(velocity.vx_center(j, i)) + std::abs(velocity.vy_center(j, i)));
    }
  }
  const double courant = lambda * speed_max;
  if (!std::isfinite(courant) || courant > 1.0) {
    std::ostringstream msg;
    msg << "finite-volume step";
    if (step_index >= 0) msg << " " << step_index;
    msg << ": Courant number " << courant << " exceeds 1 (reduce dt)";
    throw InstabilityError(msg.str());
  }

  const auto mass = density.mass();
  auto m = [&](int i, int j) { return (i < 0 || j < 0 || i >= nx || j >= ny) ? 0.0 : mass[g.index(i, j)]; };
  // Mass crossing a face during dt, positive along +x / +y. Cells outside the
  // grid are empty ghosts: zero inflow, upwind outflow.
  auto face_flux = [lambda](double v, double left, double right) {
    return lambda * (0.5 * v * (left + right) - 0.5 * std::abs(v) * (right - left));
  };

  std::vector<double> next(mass.begin(), mass.end());
  for (int j = 0; j < ny; ++j) {
    for (int a = 0; a <= nx; ++a) {
      const double flux = face_flux(velocity.vx_xface(j, a), m(a - 1, j), m(a, j));
      if (flux == 0.0) continue;
      if (a > 0) next[g.index(a - 1, j)] -= flux;
      if (a < nx) next[g.index(a, j)] += flux;
    }
  }
  for (int b = 0; b <= ny; ++b) {
    for (int i = 0; i < nx; ++i) {
      const double flux = face_flux(velocity.vy_yface(b, i), m(i, b - 1), m(i, b));
      if (flux == 0.0) continue;
      if (b > 0) next[g.index(i, b - 1)] -= flux;
      if (b < ny) next[g.index(i, b)] += flux;
    }
  }
  for (double v : next) {
    if (v < 0.0) throw InstabilityError("finite-volume step produced negative mass " + std::to_string(v));
  }
  return {DensityField::from_masses(g, std::move(next)), courant};
}

FvStepResult fv_step(const GridFieldEvaluator& field, const DensityField& density, std::span<const Vec2> agents,
                     double dt, std::ptrdiff_t step_index) {
  return fv_step(density, field.lattice_velocity(density, agents), dt, step_index);
}

FvStepResult fv_step(const DensityField& density, std::span<const Vec2> agents, const KernelSet& ks, double dt) {
  const GridFieldEvaluator field(density.grid(), ks);
  return fv_step(field, density, agents, dt);
}

LagrangianCloud advect_cloud(const LagrangianCloud& cloud, const DensityField& density, std::span<const Vec2> agents,
                             const KernelSet& ks, double dt) {
  const GridFieldEvaluator field(density.grid(), ks);
  const Points v = field.velocity_at(density, cloud.positions, agents);
  LagrangianCloud out = cloud;
  for (std::size_t n = 0; n < out.size(); ++n) out.positions[n] += dt * v[n];
  return out;
}

AgentState step_agents(const AgentState& agents, std::span<const Vec2> control_value, const KernelSet& ks, double dt) {
  if (control_value.size() != agents.size()) throw ConfigError("step_agents: control has wrong agent count");
  const Points drift = field_G(agents.positions, ks);
  AgentState out = agents;
  for (std::size_t m = 0; m < out.size(); ++m) out.positions[m] += dt * (drift[m] + control_value[m]);
  return out;
}

std::size_t step_count(double T, double dt) {
  if (!(dt > 0.0)) throw ConfigError("time: dt must be positive");
  if (!(T >= 0.0)) throw ConfigError("time: T must be nonnegative");
  const double ratio = T / dt;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9) {
    throw ConfigError("time: T / dt = " + std::to_string(ratio) + " is not an integer");
  }
  return static_cast<std::size_t>(rounded);
}

double boundary_mass(const DensityField& density) {
  const Grid& g = density.grid();
  double acc = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (i == 0 || j == 0 || i == g.nx - 1 || j == g.ny - 1) acc += density.mass_at(i, j);
    }
  }
  return acc;
}

ForwardSolver::ForwardSolver(const Grid& grid, const KernelSet& kernels, double dt, ForwardOptions options)
    : field_(grid, kernels), dt_(dt), options_(options) {
  if (!(dt > 0.0)) throw ConfigError("time: dt must be positive");
}

ForwardTrajectory ForwardSolver::solve(const DensityField& initial_density, const AgentState& initial_agents,
                                       const ControlTrajectory& control) const {
  initial_agents.validate();
  if (control.n_agents() != initial_agents.size()) {
    throw ConfigError("control has " + std::to_string(control.n_agents()) + " agents, expected " +
                      std::to_string(initial_agents.size()));
  }
  const std::size_t n_steps = control.n_steps();
  const KernelSet& ks = field_.kernels();

  ForwardTrajectory traj;
  traj.times.reserve(n_steps + 1);
  traj.densities.reserve(n_steps + 1);
  traj.courant.reserve(n_steps);

  CloudExtraction extraction = extract_cloud(initial_density, options_.mass_threshold);
  traj.path.dt = dt_;
  traj.path.weights = std::move(extraction.cloud.weights);
  traj.path.origins = extraction.cloud.origins;
  traj.path.positions.reserve(n_steps + 1);
  traj.path.agents.reserve(n_steps + 1);

  traj.times.push_back(0.0);
  traj.densities.push_back(initial_density);
  traj.path.positions.push_back(std::move(extraction.cloud.positions));
  traj.path.agents.push_back(initial_agents.positions);
  traj.boundary_mass_max = boundary_mass(initial_density);

  for (std::size_t n = 0; n < n_steps; ++n) {
    const DensityField& density = traj.densities.back();
    const Points& agents = traj.path.agents.back();
    const Points& nodes = traj.path.positions.back();

    // All updates use the fields of the state at t_n.
    FvStepResult fv = fv_step(density, field_.lattice_velocity(density, agents), dt_, static_cast<std::ptrdiff_t>(n));
    const Points node_velocity = field_.velocity_at(density, nodes, agents);
    Points next_nodes = nodes;
    for (std::size_t k = 0; k < next_nodes.size(); ++k) next_nodes[k] += dt_ * node_velocity[k];
    const std::vector<Vec2> u = control.step_values(n);
    AgentState next_agents = step_agents(AgentState{agents}, u, ks, dt_);

    traj.courant.push_back(fv.courant);
    traj.courant_max = std::max(traj.courant_max, fv.courant);
    const double edge = boundary_mass(fv.density);
    if (edge > options_.boundary_mass_warning && traj.boundary_mass_max <= options_.boundary_mass_warning) {
      traj.warnings.push_back("step " + std::to_string(n + 1) + ": boundary-adjacent mass " + std::to_string(edge) +
                              " exceeds " + std::to_string(options_.boundary_mass_warning) +
                              "; enlarge the domain box");
    }
    traj.boundary_mass_max = std::max(traj.boundary_mass_max, edge);

    traj.times.push_back(static_cast<double>(n + 1) * dt_);
    traj.densities.push_back(std::move(fv.density));
    traj.path.positions.push_back(std::move(next_nodes));
    traj.path.agents.push_back(std::move(next_agents.positions));
  }
  return traj;
}

ForwardTrajectory solve_forward(const DensityField& initial_density, const AgentState& initial_agents,
                                const ControlTrajectory& control, const KernelSet& ks, double dt, double T) {
  const std::size_t n_steps = step_count(T, dt);
  if (control.n_steps() != n_steps) {
    throw ConfigError("control has " + std::to_string(control.n_steps()) + " steps, expected " +
                      std::to_string(n_steps));
  }
  return ForwardSolver(initial_density.grid(), ks, dt).solve(initial_density, initial_agents, control);
}

}  // namespace mfsteer
