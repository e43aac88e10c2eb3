#include "mfsteer/particles.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "mfsteer/forward.hpp"

namespace mfsteer {
namespace {

// Uniform on (0, 1]: the top 53 bits, shifted off zero.
double unit_open(std::mt19937_64& rng) { return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53; }

}  // namespace

ParticleEnsemble sample_initial(double std_dev, double radius, std::size_t n, std::uint64_t seed, const Vec2& center) {
  if (n == 0) throw ConfigError("particles: N must be >= 1");
  if (!(std_dev > 0.0) || !(radius > 0.0)) throw ConfigError("particles: std and radius must be positive");
  std::mt19937_64 rng(seed);
  ParticleEnsemble out;
  out.positions.reserve(n);
  while (out.positions.size() < n) {
    const double r = std::sqrt(-2.0 * std::log(unit_open(rng)));
    const double theta = 2.0 * std::numbers::pi * unit_open(rng);
    const Vec2 z(std_dev * r * std::cos(theta), std_dev * r * std::sin(theta));
    if (z.norm() <= radius) out.positions.push_back(center + z);
  }
  return out;
}

ParticleRun simulate_particles(const ParticleEnsemble& ensemble, const AgentState& initial_agents,
                               const ControlTrajectory& control, const KernelSet& ks, double dt) {
  if (control.n_agents() != initial_agents.size()) throw ConfigError("particles: control has wrong agent count");
  const std::size_t n = ensemble.size();
  const double inv_n = 1.0 / static_cast<double>(n);

  ParticleRun run;
  Points x = ensemble.positions;
  AgentState agents = initial_agents;
  run.agent_path.reserve(control.n_steps() + 1);
  run.agent_path.push_back(agents.positions);

  Points velocity(n);
  for (std::size_t step = 0; step < control.n_steps(); ++step) {
    for (std::size_t k = 0; k < n; ++k) velocity[k] = agent_push(x[k], agents.positions, ks);
    // K is odd: the pair (i, k) contributes K(x_i - x_k) to k and its negative to i.
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = k + 1; i < n; ++i) {
        const Vec2 force = inv_n * kernel_K(x[i] - x[k], ks);
        velocity[k] += force;
        velocity[i] -= force;
      }
    }
    for (std::size_t k = 0; k < n; ++k) x[k] += dt * velocity[k];
    agents = step_agents(agents, control.step_values(step), ks, dt);
    run.agent_path.push_back(agents.positions);
  }
  run.final_ensemble.positions = std::move(x);
  return run;
}

double particle_terminal_cost(const ParticleEnsemble& ensemble, const TargetMeasure& target) {
  return particle_terminal_cost(std::span<const Vec2>(ensemble.positions), target);
}

ValidationStats validation_study(const ParticleStudy& study, const ControlTrajectory& control, std::size_t n,
                                 std::span<const std::uint64_t> seeds) {
  if (seeds.empty()) throw ConfigError("particles: need at least one seed");
  study.target.validate();
  ValidationStats stats;
  stats.n_particles = n;
  stats.seeds.assign(seeds.begin(), seeds.end());
  for (std::uint64_t seed : seeds) {
    const ParticleEnsemble initial = sample_initial(study.std_dev, study.radius, n, seed);
    ParticleRun run = simulate_particles(initial, study.initial_agents, control, study.kernels, study.dt);
    stats.costs.push_back(particle_terminal_cost(run.final_ensemble, study.target));
    stats.final_ensembles.push_back(std::move(run.final_ensemble));
  }
  const double count = static_cast<double>(stats.costs.size());
  stats.mean = std::accumulate(stats.costs.begin(), stats.costs.end(), 0.0) / count;
  double var = 0.0;
  for (double c : stats.costs) var += (c - stats.mean) * (c - stats.mean);
  stats.std_dev = std::sqrt(var / count);
  return stats;
}

}  // namespace mfsteer
