#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mfsteer/types.hpp"

namespace mfsteer {

/// Uniform Cartesian grid with square cells of side dx.
struct Grid {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
  double dx = 0.0;
  int nx = 0;
  int ny = 0;

  std::size_t cell_count() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  // Row-major: j is the row (y), i the column (x).
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i);
  }
  double x_center(int i) const { return x_min + (i + 0.5) * dx; }
  double y_center(int j) const { return y_min + (j + 0.5) * dx; }
  Vec2 cell_center(int i, int j) const { return {x_center(i), y_center(j)}; }
  double cell_area() const { return dx * dx; }

  std::vector<double> x_centers() const;
  std::vector<double> y_centers() const;
};

Grid build_grid(double x_min, double x_max, double y_min, double y_max, double dx);

/// Cell-integrated masses on a grid. Masses are nonnegative; the factories
/// normalize them to total mass one.
class DensityField {
 public:
  DensityField() = default;

  /// Takes masses as given (validated nonnegative and finite, not renormalized).
  static DensityField from_masses(Grid grid, std::vector<double> mass);
  /// Scales nonnegative weights to unit total mass. Throws on zero total.
  static DensityField normalized(Grid grid, std::vector<double> weights);

  const Grid& grid() const { return grid_; }
  std::span<const double> mass() const { return mass_; }
  double mass_at(int i, int j) const { return mass_[grid_.index(i, j)]; }
  double total_mass() const;

 private:
  DensityField(Grid grid, std::vector<double> mass) : grid_(grid), mass_(std::move(mass)) {}

  Grid grid_;
  std::vector<double> mass_;
};

/// Weighted tracer nodes. positions hold the current flow Phi(t, origin).
struct LagrangianCloud {
  Points positions;
  Points origins;
  std::vector<double> weights;

  std::size_t size() const { return positions.size(); }
  void validate() const;
};

struct AgentState {
  Points positions;

  std::size_t size() const { return positions.size(); }
  void validate() const;
};

DensityField truncated_gaussian_density(const Grid& grid, double std_dev, double radius,
                                        const Vec2& center = Vec2::Zero());

struct CloudExtraction {
  LagrangianCloud cloud;
  double discarded_mass = 0.0;
};

/// One node per cell whose mass exceeds the threshold, at the cell center.
CloudExtraction extract_cloud(const DensityField& density, double mass_threshold = 0.0);

/// Largest distance from the origin of a cell center carrying positive mass.
double support_radius(const DensityField& density);

}  // namespace mfsteer
