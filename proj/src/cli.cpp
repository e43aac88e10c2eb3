#include "mfsteer/cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mfsteer/io.hpp"
#include "mfsteer/version.hpp"

namespace mfsteer::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

json manifest_base(const std::string& command, const ProblemConfig& cfg, const CommandOptions& options) {
  json m;
  m["command"] = command;
  m["version"] = kVersion;
  m["config_path"] = options.config_path;
  m["config"] = json::parse(config_to_json(cfg));
  if (options.control_path) m["control_path"] = fs::absolute(*options.control_path).string();
  return m;
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

ControlTrajectory load_control(const CommandOptions& options, const SteeringProblem& problem, double u_max) {
  if (!options.control_path) return problem.zero_control();
  ControlTrajectory u = io::read_control_csv(*options.control_path);
  if (u.n_steps() != problem.n_steps() || u.n_agents() != problem.n_agents()) {
    throw ConfigError(*options.control_path + ": control has shape " + std::to_string(u.n_steps()) + " x " +
                      std::to_string(u.n_agents()) + ", expected " + std::to_string(problem.n_steps()) + " x " +
                      std::to_string(problem.n_agents()));
  }
  if (u.max_norm() > u_max + 1e-12) {
    throw ConfigError(*options.control_path + ": control norm " + std::to_string(u.max_norm()) +
                      " exceeds u_max = " + std::to_string(u_max));
  }
  return u;
}

// Writes density_t{n}.csv for n = 0, k, 2k, ... and always the final step.
json write_snapshots(const fs::path& dir, const ForwardTrajectory& traj, std::size_t every) {
  json files = json::array();
  const std::size_t last = traj.n_steps();
  for (std::size_t n = 0; n <= last; ++n) {
    if (n % every != 0 && n != last) continue;
    const fs::path p = dir / ("density_t" + std::to_string(n) + ".csv");
    io::write_density(p, traj.densities[n], traj.times[n]);
    files.push_back(p.filename().string());
  }
  return files;
}

void report_warnings(const ForwardTrajectory& traj, std::ostream& log) {
  for (const auto& w : traj.warnings) log << "warning: " << w << '\n';
}

}  // namespace

ProblemConfig load_config(const CommandOptions& options) {
  ProblemConfig cfg = parse_config(options.config_path);
  if (options.out_dir) cfg.output.dir = *options.out_dir;
  if (options.snapshot_every) cfg.output.snapshot_every = *options.snapshot_every;
  if (options.seed_override) {
    cfg.particles.first_seed = *options.seed_override;
    cfg.gradcheck.direction_seed = *options.seed_override;
  }
  cfg.validate();
  return cfg;
}

int cmd_solve(const CommandOptions& options, std::ostream& log) {
  const auto start = Clock::now();
  const ProblemConfig cfg = load_config(options);
  const SteeringObjective objective(cfg.make_problem());
  const ControlTrajectory initial = load_control(options, objective.problem(), cfg.optimizer.u_max);

  char line[160];
  log << "iter  cost                  pmp_residual          backtracks  step\n";
  const OptimizationResult result = optimize(objective, initial, cfg.optimizer, [&](const IterationRecord& r) {
    std::snprintf(line, sizeof line, "%4zu  %.15e  %.15e  %10zu  %g\n", r.iter, r.cost, r.pmp_residual,
                  r.backtracks, r.step_used);
    log << line;
  });
  log << "final cost " << io::format_double(result.final_cost) << " (stop: " << to_string(result.stop_reason)
      << ")\n";

  const fs::path dir = cfg.output.dir;
  fs::create_directories(dir);
  io::write_control_csv(dir / "control.csv", result.control);
  io::write_diagnostics_csv(dir / "diagnostics.csv", result.history);
  const ForwardTrajectory& traj = result.final_evaluation.forward;
  report_warnings(traj, log);
  json manifest = manifest_base("solve", cfg, options);
  manifest["snapshots"] = write_snapshots(dir, traj, cfg.output.snapshot_every);
  io::write_agents_csv(dir / "agents.csv", traj.path.agents);
  manifest["final_cost"] = result.final_cost;
  manifest["iterations"] = result.history.size();
  manifest["stop_reason"] = to_string(result.stop_reason);
  manifest["courant_max"] = traj.courant_max;
  manifest["boundary_mass_max"] = traj.boundary_mass_max;
  manifest["warnings"] = traj.warnings;
  manifest["wall_time_seconds"] = seconds_since(start);
  write_json(dir / "run_manifest.json", manifest);
  return kSuccess;
}

int cmd_forward(const CommandOptions& options, std::ostream& log) {
  const auto start = Clock::now();
  const ProblemConfig cfg = load_config(options);
  const SteeringObjective objective(cfg.make_problem());
  const ControlTrajectory control = load_control(options, objective.problem(), cfg.optimizer.u_max);
  const SteeringObjective::Evaluation eval = objective.evaluate(control);
  const ForwardTrajectory& traj = eval.forward;
  report_warnings(traj, log);
  log << "terminal cost " << io::format_double(eval.terminal.cost) << '\n';
  log << "max Courant number " << io::format_double(traj.courant_max) << '\n';

  const fs::path dir = cfg.output.dir;
  fs::create_directories(dir);
  json manifest = manifest_base("forward", cfg, options);
  manifest["snapshots"] = write_snapshots(dir, traj, cfg.output.snapshot_every);
  io::write_agents_csv(dir / "agents.csv", traj.path.agents);
  manifest["terminal_cost"] = eval.terminal.cost;
  manifest["split_offset"] = eval.terminal.plane.offset;
  manifest["split_imbalance"] = eval.terminal.plane.imbalance;
  manifest["courant_max"] = traj.courant_max;
  manifest["boundary_mass_max"] = traj.boundary_mass_max;
  manifest["warnings"] = traj.warnings;
  manifest["wall_time_seconds"] = seconds_since(start);
  write_json(dir / "run_manifest.json", manifest);
  return kSuccess;
}

int cmd_particles(const CommandOptions& options, std::ostream& log) {
  const auto start = Clock::now();
  const ProblemConfig cfg = load_config(options);
  const SteeringProblem problem = cfg.make_problem();
  const ControlTrajectory control = load_control(options, problem, cfg.optimizer.u_max);
  const std::vector<std::uint64_t> seeds = cfg.particles.seeds();
  const ValidationStats stats = validation_study(cfg.make_particle_study(), control, cfg.particles.n_particles, seeds);

  const fs::path dir = cfg.output.dir;
  fs::create_directories(dir);
  io::write_particle_summary(dir / "particles_summary.csv", dir / "particles_summary.json", stats);
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    io::write_particles_csv(dir / ("particles_seed" + std::to_string(seeds[k]) + ".csv"),
                            stats.final_ensembles[k].positions);
  }
  log << "N = " << stats.n_particles << ", seeds = " << seeds.size() << ": mean cost "
      << io::format_double(stats.mean) << ", std " << io::format_double(stats.std_dev) << '\n';

  json manifest = manifest_base("particles", cfg, options);
  manifest["mean"] = stats.mean;
  manifest["std"] = stats.std_dev;
  manifest["seeds"] = seeds;
  manifest["wall_time_seconds"] = seconds_since(start);
  write_json(dir / "run_manifest.json", manifest);
  return kSuccess;
}

int cmd_gradcheck(const CommandOptions& options, std::ostream& log) {
  const auto start = Clock::now();
  const ProblemConfig cfg = load_config(options);
  const auto& gc = cfg.gradcheck;

  struct Level {
    std::string name;
    ProblemConfig config;
  };
  std::vector<Level> levels{{"baseline", cfg}};
  if (gc.refine) levels.push_back({"refined", cfg.refined()});

  json results = json::array();
  std::vector<double> worst(levels.size(), 0.0);
  char line[200];
  log << "level     direction  epsilon     finite_difference        adjoint                  rel_error\n";
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const SteeringObjective objective(levels[l].config.make_problem());
    const SteeringProblem& problem = objective.problem();
    const ControlTrajectory control =
        l == 0 ? load_control(options, problem, cfg.optimizer.u_max) : problem.zero_control();
    for (std::size_t d = 0; d < gc.n_directions; ++d) {
      const ControlTrajectory direction =
          gc.zero_direction ? problem.zero_control()
                            : random_direction(problem.n_steps(), problem.n_agents(), gc.direction_seed + d);
      const GradientCheckReport report = gradient_check(objective, control, direction, gc.epsilons);
      for (const auto& e : report.entries) {
        std::snprintf(line, sizeof line, "%-9s %9zu  %-10.3g  %+.16e  %+.16e  %.6e\n", levels[l].name.c_str(), d,
                      e.epsilon, e.finite_difference, e.adjoint, e.relative_error);
        log << line;
        results.push_back({{"level", levels[l].name},
                           {"direction", d},
                           {"epsilon", e.epsilon},
                           {"finite_difference", e.finite_difference},
                           {"adjoint", e.adjoint},
                           {"relative_error", e.relative_error}});
      }
      worst[l] = std::max(worst[l], report.max_relative_error());
    }
  }
  const bool pass = worst[0] <= gc.tolerance;
  log << "baseline max relative error " << io::format_double(worst[0]) << (pass ? " <= " : " > ") << gc.tolerance
      << (pass ? " (pass)" : " (FAIL)") << '\n';
  if (gc.refine) {
    log << "refined max relative error " << io::format_double(worst[1])
        << (worst[1] < worst[0] ? " (decreases under refinement)" : " (does not decrease)") << '\n';
  }

  const fs::path dir = cfg.output.dir;
  fs::create_directories(dir);
  json manifest = manifest_base("gradcheck", cfg, options);
  manifest["results"] = results;
  manifest["pass"] = pass;
  manifest["wall_time_seconds"] = seconds_since(start);
  write_json(dir / "run_manifest.json", manifest);
  return pass ? kSuccess : kCheckFailed;
}

int run(int argc, char** argv) {
  CLI::App app{"Sparse mean-field steering: adjoint-based optimal control of a population toward a two-atom target"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  CommandOptions options;
  std::string control;
  std::string out;
  std::size_t snapshot_every = 0;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub, bool with_control) {
    sub->add_option("--config", options.config_path, "Scenario configuration (JSON)")->required()->check(
        CLI::ExistingFile);
    if (with_control) sub->add_option("--control", control, "Control CSV (step,agent,ux,uy); default zero");
    sub->add_option("--out", out, "Output directory (overrides output.dir)");
    sub->add_option("--snapshot-every", snapshot_every, "Write a density snapshot every K steps")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed-override", seed, "Replace the first particle seed and the gradcheck direction seed");
  };
  auto* solve = app.add_subcommand("solve", "Optimize the control by projected gradient descent");
  auto* forward = app.add_subcommand("forward", "Forward solve for a given control");
  auto* particles = app.add_subcommand("particles", "Apply a control to sampled finite populations");
  auto* gradcheck = app.add_subcommand("gradcheck", "Compare adjoint gradients with finite differences");
  add_common(solve, true);
  add_common(forward, true);
  add_common(particles, true);
  add_common(gradcheck, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kConfigError;
  }

  auto* active = app.get_subcommands().front();
  if (active->count("--control")) options.control_path = control;
  if (active->count("--out")) options.out_dir = out;
  if (active->count("--snapshot-every")) options.snapshot_every = snapshot_every;
  if (active->count("--seed-override")) options.seed_override = seed;

  try {
    if (active == solve) return cmd_solve(options, std::cout);
    if (active == forward) return cmd_forward(options, std::cout);
    if (active == particles) return cmd_particles(options, std::cout);
    return cmd_gradcheck(options, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InstabilityError& e) {
    std::cerr << "numerical instability: " << e.what() << '\n';
    return kInstability;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace mfsteer::cli
