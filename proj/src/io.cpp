#include "mfsteer/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace mfsteer::io {
namespace {

using Row = std::vector<std::string>;

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

Row split(const std::string& line) {
  Row out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  return out;
}

// Returns data rows after checking the header line.
std::vector<Row> read_table(const std::filesystem::path& path, const std::string& header) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw ConfigError(path.string() + ": expected header '" + header + "'");
  }
  const std::size_t width = split(header).size();
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Row r = split(line);
    if (r.size() != width) {
      throw ConfigError(path.string() + ": line " + std::to_string(rows.size() + 2) + " has " +
                        std::to_string(r.size()) + " fields, expected " + std::to_string(width));
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

double to_double(const std::string& s, const std::filesystem::path& path) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ConfigError(path.string() + ": malformed number '" + s + "'");
  }
  return v;
}

std::uint64_t to_index(const std::string& s, const std::filesystem::path& path) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ConfigError(path.string() + ": malformed integer '" + s + "'");
  }
  return v;
}

// Rebuilds a dense [step][agent] table from (step, agent, x, y) rows.
std::vector<Points> read_indexed_pairs(const std::filesystem::path& path, const std::string& header) {
  const auto rows = read_table(path, header);
  std::map<std::pair<std::uint64_t, std::uint64_t>, Vec2> cells;
  std::uint64_t steps = 0;
  std::uint64_t agents = 0;
  for (const auto& r : rows) {
    const std::uint64_t n = to_index(r[0], path);
    const std::uint64_t m = to_index(r[1], path);
    if (!cells.emplace(std::pair{n, m}, Vec2(to_double(r[2], path), to_double(r[3], path))).second) {
      throw ConfigError(path.string() + ": duplicate entry for step " + r[0] + ", agent " + r[1]);
    }
    steps = std::max(steps, n + 1);
    agents = std::max(agents, m + 1);
  }
  if (cells.size() != steps * agents) throw ConfigError(path.string() + ": table has missing (step, agent) entries");
  std::vector<Points> out(steps, Points(agents));
  for (const auto& [key, v] : cells) out[key.first][key.second] = v;
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_control_csv(const std::filesystem::path& path, const ControlTrajectory& control) {
  auto out = open_out(path);
  out << "step,agent,ux,uy\n";
  for (std::size_t n = 0; n < control.n_steps(); ++n) {
    for (std::size_t m = 0; m < control.n_agents(); ++m) {
      const Vec2& u = control.at(n, m);
      out << n << ',' << m << ',' << format_double(u.x()) << ',' << format_double(u.y()) << '\n';
    }
  }
}

ControlTrajectory read_control_csv(const std::filesystem::path& path) {
  const auto table = read_indexed_pairs(path, "step,agent,ux,uy");
  const std::size_t agents = table.empty() ? 0 : table.front().size();
  ControlTrajectory out(table.size(), agents);
  for (std::size_t n = 0; n < table.size(); ++n) {
    for (std::size_t m = 0; m < agents; ++m) {
      if (!table[n][m].allFinite()) throw ConfigError(path.string() + ": non-finite control value");
      out.at(n, m) = table[n][m];
    }
  }
  return out;
}

void write_diagnostics_csv(const std::filesystem::path& path, const std::vector<IterationRecord>& history) {
  auto out = open_out(path);
  out << "iter,cost,pmp_residual,backtracks,step_used\n";
  for (const auto& r : history) {
    out << r.iter << ',' << format_double(r.cost) << ',' << format_double(r.pmp_residual) << ',' << r.backtracks << ','
        << format_double(r.step_used) << '\n';
  }
}

std::vector<IterationRecord> read_diagnostics_csv(const std::filesystem::path& path) {
  std::vector<IterationRecord> out;
  for (const auto& r : read_table(path, "iter,cost,pmp_residual,backtracks,step_used")) {
    IterationRecord rec;
    rec.iter = to_index(r[0], path);
    rec.cost = to_double(r[1], path);
    rec.pmp_residual = to_double(r[2], path);
    rec.backtracks = to_index(r[3], path);
    rec.step_used = to_double(r[4], path);
    out.push_back(rec);
  }
  return out;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".json");
  return p;
}

void write_density(const std::filesystem::path& csv_path, const DensityField& density, double time) {
  const Grid& g = density.grid();
  {
    auto out = open_out(csv_path);
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        if (i > 0) out << ',';
        out << format_double(density.mass_at(i, j));
      }
      out << '\n';
    }
  }
  nlohmann::json meta = {{"x_min", g.x_min}, {"x_max", g.x_max}, {"y_min", g.y_min},
                         {"y_max", g.y_max}, {"dx", g.dx},       {"time", time}};
  auto side = open_out(sidecar_path(csv_path));
  side << meta.dump(2) << '\n';
}

DensitySnapshot read_density(const std::filesystem::path& csv_path) {
  std::ifstream side(sidecar_path(csv_path));
  if (!side) throw ConfigError("missing density sidecar " + sidecar_path(csv_path).string());
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(side);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(sidecar_path(csv_path).string() + ": " + e.what());
  }
  const Grid g = build_grid(meta.at("x_min").get<double>(), meta.at("x_max").get<double>(),
                            meta.at("y_min").get<double>(), meta.at("y_max").get<double>(),
                            meta.at("dx").get<double>());
  std::ifstream in(csv_path);
  if (!in) throw ConfigError("cannot open " + csv_path.string());
  std::vector<double> mass;
  mass.reserve(g.cell_count());
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const Row r = split(line);
    if (static_cast<int>(r.size()) != g.nx) throw ConfigError(csv_path.string() + ": row has wrong column count");
    for (const auto& cell : r) mass.push_back(to_double(cell, csv_path));
    ++rows;
  }
  if (rows != g.ny) throw ConfigError(csv_path.string() + ": wrong row count");
  return {DensityField::from_masses(g, std::move(mass)), meta.at("time").get<double>()};
}

void write_agents_csv(const std::filesystem::path& path, const std::vector<Points>& agent_path) {
  auto out = open_out(path);
  out << "step,agent,x,y\n";
  for (std::size_t n = 0; n < agent_path.size(); ++n) {
    for (std::size_t m = 0; m < agent_path[n].size(); ++m) {
      const Vec2& y = agent_path[n][m];
      out << n << ',' << m << ',' << format_double(y.x()) << ',' << format_double(y.y()) << '\n';
    }
  }
}

std::vector<Points> read_agents_csv(const std::filesystem::path& path) {
  return read_indexed_pairs(path, "step,agent,x,y");
}

void write_particle_summary(const std::filesystem::path& csv_path, const std::filesystem::path& json_path,
                            const ValidationStats& stats) {
  {
    auto out = open_out(csv_path);
    out << "seed,cost\n";
    for (std::size_t k = 0; k < stats.costs.size(); ++k) {
      out << stats.seeds[k] << ',' << format_double(stats.costs[k]) << '\n';
    }
  }
  nlohmann::json summary = {
      {"mean", stats.mean}, {"std", stats.std_dev}, {"N", stats.n_particles}, {"n_seeds", stats.costs.size()}};
  auto out = open_out(json_path);
  out << summary.dump(2) << '\n';
}

std::vector<ParticleSummaryRow> read_particle_summary_csv(const std::filesystem::path& path) {
  std::vector<ParticleSummaryRow> out;
  for (const auto& r : read_table(path, "seed,cost")) out.push_back({to_index(r[0], path), to_double(r[1], path)});
  return out;
}

void write_particles_csv(const std::filesystem::path& path, const Points& positions) {
  auto out = open_out(path);
  out << "particle,x,y\n";
  for (std::size_t k = 0; k < positions.size(); ++k) {
    out << k << ',' << format_double(positions[k].x()) << ',' << format_double(positions[k].y()) << '\n';
  }
}

Points read_particles_csv(const std::filesystem::path& path) {
  Points out;
  for (const auto& r : read_table(path, "particle,x,y")) {
    if (to_index(r[0], path) != out.size()) throw ConfigError(path.string() + ": particle indices out of order");
    out.emplace_back(to_double(r[1], path), to_double(r[2], path));
  }
  return out;
}

}  // namespace mfsteer::io
