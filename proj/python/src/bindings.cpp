#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mfsteer/cli.hpp"
#include "mfsteer/config.hpp"
#include "mfsteer/optimizer.hpp"
#include "mfsteer/particles.hpp"
#include "mfsteer/version.hpp"

namespace py = pybind11;
using namespace mfsteer;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// (steps, agents, 2) array <-> ControlTrajectory
ControlTrajectory to_control(const Array& a) {
  if (a.ndim() != 3 || a.shape(2) != 2) throw ConfigError("control must have shape (steps, agents, 2)");
  ControlTrajectory u(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
  auto r = a.unchecked<3>();
  for (py::ssize_t n = 0; n < a.shape(0); ++n) {
    for (py::ssize_t m = 0; m < a.shape(1); ++m) u.at(n, m) = Vec2(r(n, m, 0), r(n, m, 1));
  }
  return u;
}

Array from_control(const ControlTrajectory& u) {
  Array a({u.n_steps(), u.n_agents(), std::size_t{2}});
  auto w = a.mutable_unchecked<3>();
  for (std::size_t n = 0; n < u.n_steps(); ++n) {
    for (std::size_t m = 0; m < u.n_agents(); ++m) {
      w(n, m, 0) = u.at(n, m).x();
      w(n, m, 1) = u.at(n, m).y();
    }
  }
  return a;
}

Points to_points(const Array& a) {
  if (a.ndim() != 2 || a.shape(1) != 2) throw ConfigError("points must have shape (n, 2)");
  Points out;
  auto r = a.unchecked<2>();
  for (py::ssize_t k = 0; k < a.shape(0); ++k) out.emplace_back(r(k, 0), r(k, 1));
  return out;
}

Array from_points(const Points& pts) {
  Array a({pts.size(), std::size_t{2}});
  auto w = a.mutable_unchecked<2>();
  for (std::size_t k = 0; k < pts.size(); ++k) {
    w(k, 0) = pts[k].x();
    w(k, 1) = pts[k].y();
  }
  return a;
}

Array density_array(const DensityField& d) {
  const Grid& g = d.grid();
  Array a({g.ny, g.nx});
  auto w = a.mutable_unchecked<2>();
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) w(j, i) = d.mass_at(i, j);
  }
  return a;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Mean-field steering of a population by a few controlled agents";
  m.attr("__version__") = std::string(kVersion);

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InstabilityError>(m, "InstabilityError", PyExc_RuntimeError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<GaussianProfile>(m, "GaussianProfile")
      .def(py::init<double, double>(), py::arg("k"), py::arg("sigma"))
      .def_readwrite("k", &GaussianProfile::k)
      .def_readwrite("sigma", &GaussianProfile::sigma)
      .def("__call__", &GaussianProfile::value);

  py::class_<KernelSet>(m, "KernelSet")
      .def(py::init<>())
      .def_static("zero", &KernelSet::zero)
      .def_readwrite("attract_mu", &KernelSet::attract_mu)
      .def_readwrite("repel_mu", &KernelSet::repel_mu)
      .def_readwrite("leader_repel", &KernelSet::leader_repel)
      .def_readwrite("leader_attract", &KernelSet::leader_attract);

  m.def("kernel_K", &kernel_K, py::arg("z"), py::arg("kernels") = KernelSet{});
  m.def("kernel_f", &kernel_f, py::arg("z"), py::arg("kernels") = KernelSet{});
  m.def("kernel_g", &kernel_g, py::arg("z"), py::arg("kernels") = KernelSet{});
  m.def("jacobian_K", &jacobian_K, py::arg("z"), py::arg("kernels") = KernelSet{});
  m.def("jacobian_f", &jacobian_f, py::arg("z"), py::arg("kernels") = KernelSet{});
  m.def("jacobian_g", &jacobian_g, py::arg("z"), py::arg("kernels") = KernelSet{});

  py::class_<ProblemConfig>(m, "Config")
      .def_static("from_file", [](const std::string& path) { return parse_config(path); })
      .def_static("from_json", &parse_config_text)
      .def("to_json", &config_to_json)
      .def("refined", &ProblemConfig::refined)
      .def_readwrite("kernels", &ProblemConfig::kernels)
      .def_readwrite("horizon", &ProblemConfig::horizon)
      .def_readwrite("dt", &ProblemConfig::dt)
      .def_property(
          "agents", [](const ProblemConfig& c) { return from_points(c.agents); },
          [](ProblemConfig& c, const Array& a) { c.agents = to_points(a); })
      .def_property_readonly("n_steps", [](const ProblemConfig& c) { return step_count(c.horizon, c.dt); });

  py::class_<SteeringObjective>(m, "Objective")
      .def(py::init([](const ProblemConfig& c) { return SteeringObjective(c.make_problem()); }), py::arg("config"))
      .def_property_readonly("n_steps", [](const SteeringObjective& o) { return o.problem().n_steps(); })
      .def_property_readonly("n_agents", [](const SteeringObjective& o) { return o.problem().n_agents(); })
      .def_property_readonly("dt", [](const SteeringObjective& o) { return o.problem().dt; })
      .def("zero_control", [](const SteeringObjective& o) { return from_control(o.problem().zero_control()); })
      .def("cost", [](const SteeringObjective& o, const Array& u) { return o.cost(to_control(u)); })
      .def(
          "cost_and_gradient",
          [](const SteeringObjective& o, const Array& u) {
            const auto eval = o.evaluate(to_control(u));
            return py::make_tuple(eval.terminal.cost, from_control(o.gradient(eval).q));
          },
          "Terminal cost and the costate q (the L2 gradient in time)")
      .def("forward", [](const SteeringObjective& o, const Array& u) {
        const auto eval = o.evaluate(to_control(u));
        const ForwardTrajectory& t = eval.forward;
        py::list agents;
        for (const auto& a : t.path.agents) agents.append(from_points(a));
        py::dict out;
        out["cost"] = eval.terminal.cost;
        out["courant_max"] = t.courant_max;
        out["times"] = t.times;
        out["initial_density"] = density_array(t.densities.front());
        out["terminal_density"] = density_array(t.terminal_density());
        out["agents"] = agents;
        return out;
      });

  py::class_<OptimizerConfig>(m, "OptimizerConfig")
      .def(py::init<>())
      .def_readwrite("step_size", &OptimizerConfig::step_size)
      .def_readwrite("u_max", &OptimizerConfig::u_max)
      .def_readwrite("max_iters", &OptimizerConfig::max_iters)
      .def_readwrite("normalize_gradient", &OptimizerConfig::normalize_gradient);

  m.def(
      "optimize",
      [](const SteeringObjective& o, const Array& u0, const OptimizerConfig& cfg) {
        const OptimizationResult r = optimize(o, to_control(u0), cfg);
        py::list history;
        for (const auto& h : r.history) {
          py::dict d;
          d["iter"] = h.iter;
          d["cost"] = h.cost;
          d["pmp_residual"] = h.pmp_residual;
          d["backtracks"] = h.backtracks;
          d["step_used"] = h.step_used;
          history.append(d);
        }
        return py::make_tuple(from_control(r.control), r.final_cost, history);
      },
      py::arg("objective"), py::arg("initial_control"), py::arg("config") = OptimizerConfig{});

  m.def(
      "project_control", [](const Array& u, double u_max) { return from_control(project_control(to_control(u), u_max)); },
      py::arg("control"), py::arg("u_max"));
  m.def(
      "pmp_residual",
      [](const Array& q, const Array& u, double u_max, double dt) {
        return pmp_residual(to_control(q), to_control(u), u_max, dt);
      },
      py::arg("q"), py::arg("control"), py::arg("u_max"), py::arg("dt"));

  m.def(
      "particle_terminal_cost",
      [](const Array& pts, const Array& atoms) { return particle_terminal_cost(to_points(pts), {to_points(atoms)}); },
      py::arg("points"), py::arg("atoms"));
  m.def(
      "assign_particles_two_atoms",
      [](const Array& pts, const Array& atoms) { return assign_particles_two_atoms(to_points(pts), {to_points(atoms)}); },
      py::arg("points"), py::arg("atoms"));
  m.def(
      "brute_force_transport",
      [](const Array& src, std::vector<double> ws, const Array& dst, std::vector<double> wd) {
        return brute_force_transport({to_points(src), std::move(ws)}, {to_points(dst), std::move(wd)});
      },
      py::arg("source"), py::arg("source_weights"), py::arg("target"), py::arg("target_weights"));

  m.def(
      "validation_study",
      [](const ProblemConfig& c, const Array& u, std::size_t n, const std::vector<std::uint64_t>& seeds) {
        const ValidationStats s = validation_study(c.make_particle_study(), to_control(u), n, seeds);
        py::dict out;
        out["costs"] = s.costs;
        out["mean"] = s.mean;
        out["std"] = s.std_dev;
        return out;
      },
      py::arg("config"), py::arg("control"), py::arg("n_particles"), py::arg("seeds"));

  m.def(
      "main",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "mfsteer");
        std::vector<char*> argv;
        for (auto& a : args) argv.push_back(a.data());
        py::gil_scoped_release release;
        return cli::run(static_cast<int>(argv.size()), argv.data());
      },
      py::arg("args"), "Run the command-line interface; returns the exit code");
}
