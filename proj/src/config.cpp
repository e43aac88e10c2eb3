#include "mfsteer/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

#include <json.hpp>

namespace mfsteer {
namespace {

using nlohmann::json;

// Walks one JSON object, remembering which keys were consumed so that
// leftovers can be reported as typos.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_label() + " must be an object");
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  template <typename T>
  void read(const std::string& key, T& out) {
    if (!node_.contains(key)) return;
    seen_.insert(key);
    const json& v = node_.at(key);
    bool type_ok = true;
    if constexpr (std::is_same_v<T, bool>) {
      type_ok = v.is_boolean();
    } else if constexpr (std::is_integral_v<T>) {
      type_ok = v.is_number_unsigned();
    } else if constexpr (std::is_floating_point_v<T>) {
      type_ok = v.is_number();
    } else if constexpr (std::is_same_v<T, std::string>) {
      type_ok = v.is_string();
    }
    if (!type_ok) {
      throw ConfigError(key_path(key) + ": wrong type (got " + std::string(v.type_name()) + ")");
    }
    try {
      out = v.get<T>();
    } catch (const json::exception&) {
      throw ConfigError(key_path(key) + ": wrong type (got " + std::string(node_.at(key).type_name()) + ")");
    }
  }

  void read_points(const std::string& key, Points& out) {
    if (!node_.contains(key)) return;
    std::vector<std::vector<double>> raw;
    read(key, raw);
    out.clear();
    for (const auto& p : raw) {
      if (p.size() != 2) throw ConfigError(key_path(key) + ": each point needs exactly 2 coordinates");
      out.emplace_back(p[0], p[1]);
    }
  }

  Section child(const std::string& key) {
    seen_.insert(key);
    return Section(node_.at(key), key_path(key));
  }

  void finish() const {
    for (const auto& item : node_.items()) {
      if (!seen_.count(item.key())) throw ConfigError(key_path(item.key()) + ": unknown key");
    }
  }

  std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  std::string path_label() const { return path_.empty() ? "configuration root" : path_; }

  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_profile(Section& parent, const std::string& key, GaussianProfile& profile) {
  if (!parent.has(key)) return;
  Section s = parent.child(key);
  s.read("k", profile.k);
  s.read("sigma", profile.sigma);
  s.finish();
}

json profile_json(const GaussianProfile& p) { return {{"k", p.k}, {"sigma", p.sigma}}; }

json points_json(const Points& pts) {
  json out = json::array();
  for (const auto& p : pts) out.push_back({p.x(), p.y()});
  return out;
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key + ": " + what);
}

}  // namespace

std::vector<std::uint64_t> ParticleSettings::seeds() const {
  std::vector<std::uint64_t> out(n_seeds);
  for (std::size_t k = 0; k < n_seeds; ++k) out[k] = first_seed + k;
  return out;
}

Points default_agent_positions() {
  return {{-1.4, -0.15}, {-1.4, 0.0}, {-1.4, 0.15}, {1.4, -0.15}, {1.4, 0.0}, {1.4, 0.15}};
}

void ProblemConfig::validate() const {
  Grid g;
  try {
    g = build_grid(grid.x_min, grid.x_max, grid.y_min, grid.y_max, grid.dx);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
  kernels.validate();
  require(density_std > 0.0, "initial_density.std", "must be > 0");
  require(density_radius > 0.0, "initial_density.radius", "must be > 0");
  require(density_radius <= std::min({-g.x_min, g.x_max, -g.y_min, g.y_max}), "initial_density.radius",
          "support ball must lie inside the grid box");
  require(mass_threshold >= 0.0, "initial_density.mass_threshold", "must be >= 0");
  require(!agents.empty(), "agents", "need at least one controlled agent");
  for (const auto& y : agents) require(y.allFinite(), "agents", "coordinates must be finite");
  require(targets.size() == 2, "targets", "exactly 2 target atoms are supported");
  require((targets[0] - targets[1]).norm() > 0.0, "targets", "atoms must be distinct");
  require(dt > 0.0, "time.dt", "must be > 0");
  require(horizon >= 0.0, "time.T", "must be >= 0");
  try {
    (void)step_count(horizon, dt);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("time: ") + e.what());
  }
  try {
    optimizer.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(e.what());
  }
  require(particles.n_particles >= 1, "particles.N", "must be >= 1");
  require(particles.n_seeds >= 1, "particles.n_seeds", "must be >= 1");
  require(!gradcheck.epsilons.empty(), "gradcheck.epsilons", "must not be empty");
  for (double e : gradcheck.epsilons) require(e > 0.0, "gradcheck.epsilons", "entries must be > 0");
  require(gradcheck.tolerance > 0.0, "gradcheck.tolerance", "must be > 0");
  require(output.snapshot_every >= 1, "output.snapshot_every", "must be >= 1");
}

SteeringProblem ProblemConfig::make_problem() const {
  validate();
  SteeringProblem p;
  p.grid = build_grid(grid.x_min, grid.x_max, grid.y_min, grid.y_max, grid.dx);
  p.kernels = kernels;
  p.initial_density = truncated_gaussian_density(p.grid, density_std, density_radius);
  p.initial_agents = AgentState{agents};
  p.target = TargetMeasure{targets};
  p.dt = dt;
  p.horizon = horizon;
  p.mass_threshold = mass_threshold;
  return p;
}

ParticleStudy ProblemConfig::make_particle_study() const {
  validate();
  ParticleStudy s;
  s.std_dev = density_std;
  s.radius = density_radius;
  s.initial_agents = AgentState{agents};
  s.target = TargetMeasure{targets};
  s.kernels = kernels;
  s.dt = dt;
  return s;
}

ProblemConfig ProblemConfig::refined() const {
  ProblemConfig out = *this;
  out.grid.dx *= 0.5;
  out.dt *= 0.5;
  return out;
}

ProblemConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  ProblemConfig cfg;
  Section top(root, "");

  if (top.has("grid")) {
    Section s = top.child("grid");
    s.read("x_min", cfg.grid.x_min);
    s.read("x_max", cfg.grid.x_max);
    s.read("y_min", cfg.grid.y_min);
    s.read("y_max", cfg.grid.y_max);
    s.read("dx", cfg.grid.dx);
    s.finish();
  }
  if (top.has("kernels")) {
    Section s = top.child("kernels");
    read_profile(s, "attract_mu", cfg.kernels.attract_mu);
    read_profile(s, "repel_mu", cfg.kernels.repel_mu);
    read_profile(s, "leader_repel", cfg.kernels.leader_repel);
    read_profile(s, "leader_attract", cfg.kernels.leader_attract);
    s.finish();
  }
  if (top.has("initial_density")) {
    Section s = top.child("initial_density");
    s.read("std", cfg.density_std);
    s.read("radius", cfg.density_radius);
    s.read("mass_threshold", cfg.mass_threshold);
    s.finish();
  }
  top.read_points("agents", cfg.agents);
  top.read_points("targets", cfg.targets);
  if (top.has("time")) {
    Section s = top.child("time");
    s.read("T", cfg.horizon);
    s.read("dt", cfg.dt);
    s.finish();
  }
  if (top.has("optimizer")) {
    Section s = top.child("optimizer");
    s.read("step_size", cfg.optimizer.step_size);
    s.read("u_max", cfg.optimizer.u_max);
    s.read("armijo_c", cfg.optimizer.armijo_c);
    s.read("armijo_beta", cfg.optimizer.armijo_beta);
    s.read("max_backtracks", cfg.optimizer.max_backtracks);
    s.read("max_iters", cfg.optimizer.max_iters);
    s.read("cost_tolerance", cfg.optimizer.cost_tolerance);
    s.read("normalize_gradient", cfg.optimizer.normalize_gradient);
    s.finish();
  }
  if (top.has("particles")) {
    Section s = top.child("particles");
    s.read("N", cfg.particles.n_particles);
    s.read("n_seeds", cfg.particles.n_seeds);
    s.read("first_seed", cfg.particles.first_seed);
    s.finish();
  }
  if (top.has("gradcheck")) {
    Section s = top.child("gradcheck");
    s.read("epsilons", cfg.gradcheck.epsilons);
    s.read("n_directions", cfg.gradcheck.n_directions);
    s.read("direction_seed", cfg.gradcheck.direction_seed);
    s.read("zero_direction", cfg.gradcheck.zero_direction);
    s.read("refine", cfg.gradcheck.refine);
    s.read("tolerance", cfg.gradcheck.tolerance);
    s.finish();
  }
  if (top.has("output")) {
    Section s = top.child("output");
    s.read("dir", cfg.output.dir);
    s.read("snapshot_every", cfg.output.snapshot_every);
    s.finish();
  }
  top.finish();
  cfg.validate();
  return cfg;
}

ProblemConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string config_to_json(const ProblemConfig& c) {
  json root;
  root["grid"] = {{"x_min", c.grid.x_min}, {"x_max", c.grid.x_max}, {"y_min", c.grid.y_min},
                  {"y_max", c.grid.y_max}, {"dx", c.grid.dx}};
  root["kernels"] = {{"attract_mu", profile_json(c.kernels.attract_mu)},
                     {"repel_mu", profile_json(c.kernels.repel_mu)},
                     {"leader_repel", profile_json(c.kernels.leader_repel)},
                     {"leader_attract", profile_json(c.kernels.leader_attract)}};
  root["initial_density"] = {{"std", c.density_std}, {"radius", c.density_radius},
                             {"mass_threshold", c.mass_threshold}};
  root["agents"] = points_json(c.agents);
  root["targets"] = points_json(c.targets);
  root["time"] = {{"T", c.horizon}, {"dt", c.dt}};
  root["optimizer"] = {{"step_size", c.optimizer.step_size},
                       {"u_max", c.optimizer.u_max},
                       {"armijo_c", c.optimizer.armijo_c},
                       {"armijo_beta", c.optimizer.armijo_beta},
                       {"max_backtracks", c.optimizer.max_backtracks},
                       {"max_iters", c.optimizer.max_iters},
                       {"cost_tolerance", c.optimizer.cost_tolerance},
                       {"normalize_gradient", c.optimizer.normalize_gradient}};
  root["particles"] = {{"N", c.particles.n_particles},
                       {"n_seeds", c.particles.n_seeds},
                       {"first_seed", c.particles.first_seed}};
  root["gradcheck"] = {{"epsilons", c.gradcheck.epsilons},     {"n_directions", c.gradcheck.n_directions},
                       {"direction_seed", c.gradcheck.direction_seed}, {"zero_direction", c.gradcheck.zero_direction},
                       {"refine", c.gradcheck.refine},         {"tolerance", c.gradcheck.tolerance}};
  root["output"] = {{"dir", c.output.dir}, {"snapshot_every", c.output.snapshot_every}};
  return root.dump(2);
}

}  // namespace mfsteer
