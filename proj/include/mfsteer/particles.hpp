#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mfsteer/control.hpp"
#include "mfsteer/geometry.hpp"
#include "mfsteer/kernels.hpp"
#include "mfsteer/transport.hpp"

namespace mfsteer {

/// N passive agents, each carrying mass 1/N.
struct ParticleEnsemble {
  Points positions;

  std::size_t size() const { return positions.size(); }
};

/// Draws N points from the Gaussian (std) restricted to the ball of the given
/// radius by rejection. Normals come from Box-Muller on std::mt19937_64
/// output, so ensembles are identical across platforms for a given seed.
ParticleEnsemble sample_initial(double std_dev, double radius, std::size_t n, std::uint64_t seed,
                                const Vec2& center = Vec2::Zero());

struct ParticleRun {
  ParticleEnsemble final_ensemble;
  std::vector<Points> agent_path;  // [step][agent], n_steps + 1 entries
};

/// Forward Euler for the N-agent system with direct O(N^2) pair sums.
ParticleRun simulate_particles(const ParticleEnsemble& ensemble, const AgentState& initial_agents,
                               const ControlTrajectory& control, const KernelSet& ks, double dt);

/// 1/2 W_2^2 between the empirical measure and the two-atom target.
double particle_terminal_cost(const ParticleEnsemble& ensemble, const TargetMeasure& target);

struct ValidationStats {
  std::vector<std::uint64_t> seeds;
  std::vector<double> costs;  // per seed
  double mean = 0.0;
  double std_dev = 0.0;  // population standard deviation
  std::size_t n_particles = 0;
  std::vector<ParticleEnsemble> final_ensembles;  // per seed
};

struct ParticleStudy {
  double std_dev = 1.2;
  double radius = 0.8;
  AgentState initial_agents;
  TargetMeasure target;
  KernelSet kernels;
  double dt = 0.005;
};

ValidationStats validation_study(const ParticleStudy& study, const ControlTrajectory& control, std::size_t n,
                                 std::span<const std::uint64_t> seeds);

}  // namespace mfsteer
