#include "mfsteer/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace mfsteer {

void TargetMeasure::validate() const {
  if (atoms.size() != 2) {
    throw ConfigError("targets: exactly 2 atoms are supported, got " + std::to_string(atoms.size()));
  }
  for (const auto& z : atoms) {
    if (!z.allFinite()) throw ConfigError("targets: non-finite atom");
  }
  if ((atoms[1] - atoms[0]).norm() == 0.0) throw ConfigError("targets: atoms coincide");
}

SplitPlane bisect_split(const DensityField& density, const TargetMeasure& target) {
  target.validate();
  const Grid& g = density.grid();
  SplitPlane plane;
  plane.normal = (target.atoms[1] - target.atoms[0]).normalized();

  std::vector<double> proj;
  std::vector<double> mass;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double m = density.mass_at(i, j);
      if (m > 0.0) {
        proj.push_back(plane.normal.dot(g.cell_center(i, j)));
        mass.push_back(m);
      }
    }
  }
  auto mass_left = [&](double b) {
    double acc = 0.0;
    for (std::size_t c = 0; c < proj.size(); ++c) {
      if (proj[c] < b) acc += mass[c];
    }
    return acc;
  };

  const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
  const double half = 0.5 * total;
  double lo = *std::min_element(proj.begin(), proj.end());
  double hi = *std::max_element(proj.begin(), proj.end()) + g.dx;
  // Invariant: mass_left(lo) < half <= mass_left(hi).
  while (hi - lo >= 1e-9 * g.dx) {
    const double mid = 0.5 * (lo + hi);
    if (mass_left(mid) < half) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double level_lo = mass_left(lo);
  const double level_hi = mass_left(hi);
  const bool take_hi = std::abs(level_hi - half) <= std::abs(level_lo - half);

  // The chosen level holds between the nearest projections on either side of
  // the pivot; center the offset in that gap.
  const double inf = std::numeric_limits<double>::infinity();
  const double pivot = take_hi ? hi : lo;
  double below = -inf;
  double above = inf;
  for (double p : proj) {
    if (p < pivot) below = std::max(below, p);
    if (p >= pivot) above = std::min(above, p);
  }
  if (!std::isfinite(below)) {
    plane.offset = above - 0.5 * g.dx;
  } else if (!std::isfinite(above)) {
    plane.offset = below + 0.5 * g.dx;
  } else {
    plane.offset = 0.5 * (below + above);
  }
  plane.mass_left = mass_left(plane.offset);
  plane.imbalance = std::abs(plane.mass_left - 0.5);
  return plane;
}

std::size_t assign_side(const Vec2& point, const SplitPlane& plane) {
  return plane.normal.dot(point) < plane.offset ? 0 : 1;
}

TerminalCost evaluate_terminal_cost(const DensityField& density, const TargetMeasure& target) {
  TerminalCost out;
  out.plane = bisect_split(density, target);
  const Grid& g = density.grid();
  double acc = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double m = density.mass_at(i, j);
      if (m == 0.0) continue;
      const Vec2 x = g.cell_center(i, j);
      acc += m * (x - target.atoms[assign_side(x, out.plane)]).squaredNorm();
    }
  }
  out.cost = 0.5 * acc;
  return out;
}

double terminal_cost(const DensityField& density, const TargetMeasure& target) {
  return evaluate_terminal_cost(density, target).cost;
}

std::vector<std::size_t> assign_particles_two_atoms(std::span<const Vec2> points, const TargetMeasure& target) {
  target.validate();
  const std::size_t n = points.size();
  std::vector<double> key(n);
  for (std::size_t k = 0; k < n; ++k) {
    key[k] = (points[k] - target.atoms[0]).squaredNorm() - (points[k] - target.atoms[1]).squaredNorm();
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
  const std::size_t first_count = (n + 1) / 2;  // odd N: the median joins atom 0
  std::vector<std::size_t> side(n, 1);
  for (std::size_t r = 0; r < first_count; ++r) side[order[r]] = 0;
  return side;
}

double particle_terminal_cost(std::span<const Vec2> points, const TargetMeasure& target) {
  const auto side = assign_particles_two_atoms(points, target);
  double acc = 0.0;
  for (std::size_t k = 0; k < points.size(); ++k) acc += (points[k] - target.atoms[side[k]]).squaredNorm();
  return 0.5 * acc / static_cast<double>(points.size());
}

namespace {

// Smallest D <= 24 such that every weight is a multiple of 1/D.
int common_denominator(const std::vector<double>& a, const std::vector<double>& b) {
  for (int d = 1; d <= 24; ++d) {
    auto fits = [d](double w) { return std::abs(w * d - std::round(w * d)) < 1e-9; };
    if (std::all_of(a.begin(), a.end(), fits) && std::all_of(b.begin(), b.end(), fits)) return d;
  }
  throw ConfigError("brute_force_transport: weights are not on a rational grid with denominator <= 24");
}

std::vector<int> to_units(const std::vector<double>& w, int d) {
  std::vector<int> out;
  for (double v : w) out.push_back(static_cast<int>(std::lround(v * d)));
  return out;
}

}  // namespace

double brute_force_transport(const DiscreteMeasure& source, const DiscreteMeasure& target) {
  const std::size_t n = source.points.size();
  const std::size_t k = target.points.size();
  if (n == 0 || k == 0 || n > 8 || k > 4) throw ConfigError("brute_force_transport: instance too large");
  if (source.weights.size() != n || target.weights.size() != k) {
    throw ConfigError("brute_force_transport: weights and points differ in length");
  }
  const int d = common_denominator(source.weights, target.weights);
  const std::vector<int> supply = to_units(source.weights, d);
  const std::vector<int> demand = to_units(target.weights, d);
  if (std::accumulate(supply.begin(), supply.end(), 0) != std::accumulate(demand.begin(), demand.end(), 0)) {
    throw ConfigError("brute_force_transport: measures have different total mass");
  }

  // Memoized search: source i distributes its units over the remaining target capacities.
  std::vector<std::unordered_map<std::uint64_t, double>> memo(n);
  auto encode = [](const std::vector<int>& cap) {
    std::uint64_t key = 0;
    for (int c : cap) key = key * 64 + static_cast<std::uint64_t>(c);
    return key;
  };
  std::vector<int> cap = demand;
  auto solve = [&](auto&& self, std::size_t i) -> double {
    if (i == n) return 0.0;
    const std::uint64_t key = encode(cap);
    if (auto it = memo[i].find(key); it != memo[i].end()) return it->second;
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> take(k, 0);
    auto split = [&](auto&& rec, std::size_t j, int left) -> void {
      if (j + 1 == k) {
        if (left > cap[j]) return;
        take[j] = left;
        double step = 0.0;
        for (std::size_t t = 0; t < k; ++t) {
          step += take[t] * (source.points[i] - target.points[t]).squaredNorm();
          cap[t] -= take[t];
        }
        best = std::min(best, step / d + self(self, i + 1));
        for (std::size_t t = 0; t < k; ++t) cap[t] += take[t];
        return;
      }
      for (int u = 0; u <= std::min(left, cap[j]); ++u) {
        take[j] = u;
        rec(rec, j + 1, left - u);
      }
    };
    split(split, 0, supply[i]);
    memo[i][key] = best;
    return best;
  };
  return solve(solve, 0);
}

}  // namespace mfsteer
