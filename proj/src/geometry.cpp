#include "mfsteer/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mfsteer {
namespace {

int cell_count_along(double lo, double hi, double dx, const char* axis) {
  const double ratio = (hi - lo) / dx;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-12 * std::max(1.0, ratio)) {
    throw ConfigError(std::string("grid: ") + axis + " extent " + std::to_string(hi - lo) +
                      " is not an integer multiple of dx = " + std::to_string(dx));
  }
  return static_cast<int>(rounded);
}

}  // namespace

std::vector<double> Grid::x_centers() const {
  std::vector<double> out(static_cast<std::size_t>(nx));
  for (int i = 0; i < nx; ++i) out[static_cast<std::size_t>(i)] = x_center(i);
  return out;
}

std::vector<double> Grid::y_centers() const {
  std::vector<double> out(static_cast<std::size_t>(ny));
  for (int j = 0; j < ny; ++j) out[static_cast<std::size_t>(j)] = y_center(j);
  return out;
}

Grid build_grid(double x_min, double x_max, double y_min, double y_max, double dx) {
  if (!(dx > 0.0) || !std::isfinite(dx)) throw ConfigError("grid: dx must be positive");
  if (!(x_max > x_min) || !(y_max > y_min)) throw ConfigError("grid: empty domain box");
  Grid g{x_min, x_max, y_min, y_max, dx, 0, 0};
  g.nx = cell_count_along(x_min, x_max, dx, "x");
  g.ny = cell_count_along(y_min, y_max, dx, "y");
  if (g.nx < 2 || g.ny < 2) throw ConfigError("grid: need at least 2 cells per axis");
  return g;
}

DensityField DensityField::from_masses(Grid grid, std::vector<double> mass) {
  if (mass.size() != grid.cell_count()) {
    throw ConfigError("density: expected " + std::to_string(grid.cell_count()) + " cell masses, got " +
                      std::to_string(mass.size()));
  }
  for (double m : mass) {
    if (!std::isfinite(m) || m < 0.0) throw ConfigError("density: cell masses must be finite and nonnegative");
  }
  return DensityField(grid, std::move(mass));
}

DensityField DensityField::normalized(Grid grid, std::vector<double> weights) {
  DensityField d = from_masses(grid, std::move(weights));
  const double total = d.total_mass();
  if (!(total > 0.0)) throw ConfigError("density: total mass is zero");
  for (double& m : d.mass_) m /= total;
  return d;
}

double DensityField::total_mass() const { return std::accumulate(mass_.begin(), mass_.end(), 0.0); }

void LagrangianCloud::validate() const {
  if (positions.empty()) throw ConfigError("cloud: no nodes");
  if (origins.size() != positions.size() || weights.size() != positions.size()) {
    throw ConfigError("cloud: positions, origins and weights differ in length");
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("cloud: weights do not sum to one");
}

void AgentState::validate() const {
  if (positions.empty()) throw ConfigError("agents: need at least one controlled agent");
  for (const auto& y : positions) {
    if (!y.allFinite()) throw ConfigError("agents: non-finite coordinate");
  }
}

DensityField truncated_gaussian_density(const Grid& grid, double std_dev, double radius, const Vec2& center) {
  if (!(std_dev > 0.0)) throw ConfigError("initial density: std must be positive");
  if (!(radius > 0.0)) throw ConfigError("initial density: radius must be positive");
  if (center.x() - radius < grid.x_min || center.x() + radius > grid.x_max || center.y() - radius < grid.y_min ||
      center.y() + radius > grid.y_max) {
    throw ConfigError("initial density: support ball leaves the grid box");
  }
  std::vector<double> w(grid.cell_count(), 0.0);
  const double inv_two_var = 1.0 / (2.0 * std_dev * std_dev);
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const double r2 = (grid.cell_center(i, j) - center).squaredNorm();
      if (std::sqrt(r2) <= radius) w[grid.index(i, j)] = std::exp(-r2 * inv_two_var);
    }
  }
  if (std::all_of(w.begin(), w.end(), [](double v) { return v == 0.0; })) {
    throw ConfigError("initial density: no cell center inside the support ball (radius below one cell)");
  }
  return DensityField::normalized(grid, std::move(w));
}

CloudExtraction extract_cloud(const DensityField& density, double mass_threshold) {
  const auto mass = density.mass();
  const double max_mass = *std::max_element(mass.begin(), mass.end());
  if (mass_threshold < 0.0 || mass_threshold >= max_mass) {
    throw ConfigError("cloud: mass threshold must lie in [0, max cell mass)");
  }
  const Grid& g = density.grid();
  CloudExtraction out;
  double kept = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double m = mass[g.index(i, j)];
      if (m > mass_threshold) {
        out.cloud.positions.push_back(g.cell_center(i, j));
        out.cloud.weights.push_back(m);
        kept += m;
      } else {
        out.discarded_mass += m;
      }
    }
  }
  for (double& w : out.cloud.weights) w /= kept;
  out.cloud.origins = out.cloud.positions;
  return out;
}

double support_radius(const DensityField& density) {
  const Grid& g = density.grid();
  double r = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (density.mass_at(i, j) > 0.0) r = std::max(r, g.cell_center(i, j).norm());
    }
  }
  return r;
}

}  // namespace mfsteer
