#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mfsteer/control.hpp"
#include "mfsteer/geometry.hpp"
#include "mfsteer/optimizer.hpp"
#include "mfsteer/particles.hpp"

namespace mfsteer::io {

/// Shortest decimal form that round-trips the double exactly (17 significant digits).
std::string format_double(double v);

// control.csv: step,agent,ux,uy
void write_control_csv(const std::filesystem::path& path, const ControlTrajectory& control);
/// Shape is inferred from the file (steps and agents must form a full table).
ControlTrajectory read_control_csv(const std::filesystem::path& path);

// diagnostics.csv: iter,cost,pmp_residual,backtracks,step_used
void write_diagnostics_csv(const std::filesystem::path& path, const std::vector<IterationRecord>& history);
std::vector<IterationRecord> read_diagnostics_csv(const std::filesystem::path& path);

/// density_t{i}.csv (ny rows x nx columns, row j = y index) plus a JSON
/// sidecar {x_min, x_max, y_min, y_max, dx, time}.
void write_density(const std::filesystem::path& csv_path, const DensityField& density, double time);
struct DensitySnapshot {
  DensityField density;
  double time = 0.0;
};
DensitySnapshot read_density(const std::filesystem::path& csv_path);
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

// agents.csv: step,agent,x,y
void write_agents_csv(const std::filesystem::path& path, const std::vector<Points>& agent_path);
std::vector<Points> read_agents_csv(const std::filesystem::path& path);

// particles_summary.csv: seed,cost, plus particles_summary.json {mean, std, N, n_seeds}
void write_particle_summary(const std::filesystem::path& csv_path, const std::filesystem::path& json_path,
                            const ValidationStats& stats);
struct ParticleSummaryRow {
  std::uint64_t seed = 0;
  double cost = 0.0;
};
std::vector<ParticleSummaryRow> read_particle_summary_csv(const std::filesystem::path& path);

// particles_seed{s}.csv: particle,x,y
void write_particles_csv(const std::filesystem::path& path, const Points& positions);
Points read_particles_csv(const std::filesystem::path& path);

}  // namespace mfsteer::io
