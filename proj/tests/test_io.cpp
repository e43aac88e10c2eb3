#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include <json.hpp>

#include "mfsteer/io.hpp"
#include "support.hpp"

namespace mfsteer {
namespace {

namespace fs = std::filesystem;

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

TEST(FormatDouble, RoundTripsExactly) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int k = 0; k < 1000; ++k) {
    const double v = u(rng) * std::pow(10.0, k % 40 - 20);
    EXPECT_EQ(std::stod(io::format_double(v)), v);
  }
  EXPECT_EQ(std::stod(io::format_double(0.1)), 0.1);
}

TEST(ControlCsv, RoundTrip) {
  const fs::path dir = testing::scratch_dir("io_control");
  std::mt19937_64 rng(1);
  ControlTrajectory u(7, 3);
  for (auto& v : u.values()) v = testing::random_point(rng);
  io::write_control_csv(dir / "control.csv", u);
  EXPECT_EQ(first_line(dir / "control.csv"), "step,agent,ux,uy");
  const ControlTrajectory back = io::read_control_csv(dir / "control.csv");
  EXPECT_EQ(back.n_steps(), 7u);
  EXPECT_EQ(back.n_agents(), 3u);
  EXPECT_EQ(back.values(), u.values());
}

TEST(ControlCsv, RejectsMalformedTables) {
  const fs::path dir = testing::scratch_dir("io_control_bad");
  write_text(dir / "header.csv", "step,agent,x,y\n0,0,1,2\n");
  EXPECT_THROW(io::read_control_csv(dir / "header.csv"), ConfigError);
  write_text(dir / "missing.csv", "step,agent,ux,uy\n0,0,0,0\n0,1,0,0\n1,0,0,0\n");
  EXPECT_THROW(io::read_control_csv(dir / "missing.csv"), ConfigError);
  write_text(dir / "dup.csv", "step,agent,ux,uy\n0,0,0,0\n0,0,0,0\n");
  EXPECT_THROW(io::read_control_csv(dir / "dup.csv"), ConfigError);
  write_text(dir / "num.csv", "step,agent,ux,uy\n0,0,abc,0\n");
  EXPECT_THROW(io::read_control_csv(dir / "num.csv"), ConfigError);
  EXPECT_THROW(io::read_control_csv(dir / "absent.csv"), ConfigError);
}

TEST(DiagnosticsCsv, RoundTrip) {
  const fs::path dir = testing::scratch_dir("io_diag");
  const std::vector<IterationRecord> h{{0, 0.3, 1.0, 2, 0.025}, {1, 0.2, 0.5, 0, 0.1}, {2, 0.2, 0.4, 20, 0.0}};
  io::write_diagnostics_csv(dir / "diagnostics.csv", h);
  EXPECT_EQ(first_line(dir / "diagnostics.csv"), "iter,cost,pmp_residual,backtracks,step_used");
  const auto back = io::read_diagnostics_csv(dir / "diagnostics.csv");
  ASSERT_EQ(back.size(), h.size());
  for (std::size_t k = 0; k < h.size(); ++k) {
    EXPECT_EQ(back[k].iter, h[k].iter);
    EXPECT_EQ(back[k].cost, h[k].cost);
    EXPECT_EQ(back[k].pmp_residual, h[k].pmp_residual);
    EXPECT_EQ(back[k].backtracks, h[k].backtracks);
    EXPECT_EQ(back[k].step_used, h[k].step_used);
  }
}

TEST(DensityIo, RoundTripWithSidecar) {
  const fs::path dir = testing::scratch_dir("io_density");
  const Grid g = build_grid(-1.0, 1.0, -0.5, 0.5, 0.25);
  const DensityField d = truncated_gaussian_density(g, 1.2, 0.5);
  io::write_density(dir / "density_t4.csv", d, 0.02);
  EXPECT_EQ(io::sidecar_path(dir / "density_t4.csv"), dir / "density_t4.json");
  std::ifstream side(dir / "density_t4.json");
  const nlohmann::json meta = nlohmann::json::parse(side);
  EXPECT_EQ(meta.at("dx").get<double>(), 0.25);
  EXPECT_EQ(meta.at("x_min").get<double>(), -1.0);
  EXPECT_EQ(meta.at("time").get<double>(), 0.02);

  // ny rows of nx columns
  std::ifstream csv(dir / "density_t4.csv");
  std::string line;
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), g.nx - 1);
  }
  EXPECT_EQ(rows, g.ny);

  const io::DensitySnapshot s = io::read_density(dir / "density_t4.csv");
  EXPECT_EQ(s.time, 0.02);
  EXPECT_EQ(s.density.grid().nx, g.nx);
  EXPECT_EQ(s.density.grid().ny, g.ny);
  ASSERT_EQ(s.density.mass().size(), d.mass().size());
  for (std::size_t c = 0; c < d.mass().size(); ++c) EXPECT_EQ(s.density.mass()[c], d.mass()[c]);

  fs::remove(dir / "density_t4.json");
  EXPECT_THROW(io::read_density(dir / "density_t4.csv"), ConfigError);
}

TEST(AgentsCsv, RoundTrip) {
  const fs::path dir = testing::scratch_dir("io_agents");
  const std::vector<Points> path{{Vec2(0.1, 0.2), Vec2(-1, 3)}, {Vec2(0.15, 0.25), Vec2(-0.9, 2.5)}};
  io::write_agents_csv(dir / "agents.csv", path);
  EXPECT_EQ(first_line(dir / "agents.csv"), "step,agent,x,y");
  EXPECT_EQ(io::read_agents_csv(dir / "agents.csv"), path);
}

TEST(ParticleFiles, SummaryAndPositions) {
  const fs::path dir = testing::scratch_dir("io_particles");
  ValidationStats stats;
  stats.seeds = {3, 4};
  stats.costs = {0.25, 0.5};
  stats.mean = 0.375;
  stats.std_dev = 0.125;
  stats.n_particles = 10;
  io::write_particle_summary(dir / "particles_summary.csv", dir / "particles_summary.json", stats);
  EXPECT_EQ(first_line(dir / "particles_summary.csv"), "seed,cost");
  const auto rows = io::read_particle_summary_csv(dir / "particles_summary.csv");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].seed, 4u);
  EXPECT_EQ(rows[1].cost, 0.5);
  std::ifstream js(dir / "particles_summary.json");
  const nlohmann::json summary = nlohmann::json::parse(js);
  EXPECT_EQ(summary.at("mean").get<double>(), 0.375);
  EXPECT_EQ(summary.at("std").get<double>(), 0.125);
  EXPECT_EQ(summary.at("N").get<int>(), 10);
  EXPECT_EQ(summary.at("n_seeds").get<int>(), 2);

  const Points pts{Vec2(0.1, -0.2), Vec2(1.0 / 3.0, 2.0)};
  io::write_particles_csv(dir / "particles_seed3.csv", pts);
  EXPECT_EQ(io::read_particles_csv(dir / "particles_seed3.csv"), pts);
}

}  // namespace
}  // namespace mfsteer
