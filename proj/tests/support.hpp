#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "mfsteer/config.hpp"
#include "mfsteer/problem.hpp"

namespace mfsteer::testing {

// Coarse scenario that solves in milliseconds.
inline ProblemConfig small_config() {
  ProblemConfig cfg;
  cfg.grid = {-1.5, 1.5, -1.5, 1.5, 0.1};
  cfg.agents = {{-1.0, 0.0}, {1.0, 0.0}};
  cfg.horizon = 0.3;
  cfg.dt = 0.01;
  cfg.optimizer.max_iters = 3;
  cfg.particles.n_particles = 20;
  cfg.particles.n_seeds = 2;
  return cfg;
}

inline ProblemConfig case_study_config() { return parse_config(MFSTEER_SOURCE_DIR "/configs/case_study.json"); }

inline Vec2 random_point(std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  const double x = u(rng);
  return {x, u(rng)};
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("mfsteer_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace mfsteer::testing
