#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mfsteer/kernels.hpp"
#include "mfsteer/optimizer.hpp"
#include "mfsteer/particles.hpp"
#include "mfsteer/problem.hpp"

namespace mfsteer {

struct GridSpec {
  double x_min = -2.5;
  double x_max = 2.5;
  double y_min = -2.5;
  double y_max = 2.5;
  double dx = 0.05;
};

struct ParticleSettings {
  std::size_t n_particles = 500;
  std::size_t n_seeds = 50;
  std::uint64_t first_seed = 1;

  std::vector<std::uint64_t> seeds() const;
};

struct GradcheckSettings {
  std::vector<double> epsilons{1e-3};
  std::size_t n_directions = 3;
  std::uint64_t direction_seed = 7;
  bool zero_direction = false;
  bool refine = false;     // also run with dt and dx halved
  double tolerance = 0.05;
};

struct OutputSettings {
  std::string dir = "out";
  std::size_t snapshot_every = 25;
};

/// Default agent placement of the case study.
Points default_agent_positions();

/// A full scenario. Defaults reproduce the bundled case study.
struct ProblemConfig {
  GridSpec grid;
  KernelSet kernels;
  double density_std = 1.2;
  double density_radius = 0.8;
  double mass_threshold = 0.0;
  Points agents = default_agent_positions();
  Points targets{{0.0, -1.0}, {0.0, 1.0}};
  double horizon = 1.5;
  double dt = 0.005;
  OptimizerConfig optimizer;
  ParticleSettings particles;
  GradcheckSettings gradcheck;
  OutputSettings output;

  /// Checks every module precondition; throws ConfigError naming the key.
  void validate() const;

  SteeringProblem make_problem() const;
  ParticleStudy make_particle_study() const;
  /// Same scenario with dt and dx halved.
  ProblemConfig refined() const;
};

/// Parses a JSON document. Missing keys keep their defaults; unknown keys,
/// type mismatches and constraint violations raise ConfigError with the key path.
ProblemConfig parse_config_text(const std::string& text);
ProblemConfig parse_config(const std::filesystem::path& path);

/// Full resolved configuration, re-parseable by parse_config_text.
std::string config_to_json(const ProblemConfig& config);

}  // namespace mfsteer
