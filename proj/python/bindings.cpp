#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "nrpursuit/config.hpp"
#include "nrpursuit/report.hpp"
#include "nrpursuit/sim.hpp"

namespace py = pybind11;
using namespace nrpursuit;

namespace {

Vec2 to_vec2(const std::array<double, 2>& a) { return {a[0], a[1]}; }
std::array<double, 2> from_vec2(const Vec2& v) { return {v.x, v.y}; }

DubinsState to_state(const std::array<double, 3>& a) { return {{a[0], a[1]}, a[2]}; }

// Rows of (x, y, heading) or of the sensitivity, one per prediction sample.
Eigen::MatrixXd stack(const std::vector<DubinsState>& xi) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(xi.size()), 3);
  for (std::size_t k = 0; k < xi.size(); ++k) m.row(static_cast<Eigen::Index>(k)) << xi[k].pos.x, xi[k].pos.y, xi[k].heading;
  return m;
}

Eigen::MatrixXd stack(const std::vector<Eigen::Vector3d>& s) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(s.size()), 3);
  for (std::size_t k = 0; k < s.size(); ++k) m.row(static_cast<Eigen::Index>(k)) = s[k].transpose();
  return m;
}

// Numeric trace as a (rows x columns) matrix in trace_columns() order.
Eigen::MatrixXd trace_matrix(const SimTrace& t) {
  const std::size_t n = t.n_pursuers;
  const Eigen::Index cols = static_cast<Eigen::Index>(trace_columns(n).size());
  Eigen::MatrixXd m(static_cast<Eigen::Index>(t.rows.size()), cols);
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    const TraceRow& r = t.rows[k];
    Eigen::Index c = 0;
    const auto row = static_cast<Eigen::Index>(k);
    m(row, c++) = r.t;
    for (std::size_t i = 0; i < n; ++i) {
      m(row, c++) = r.pursuers[i].pos.x;
      m(row, c++) = r.pursuers[i].pos.y;
      m(row, c++) = wrap_angle(r.pursuers[i].heading);
      m(row, c++) = r.u[i];
    }
    m(row, c++) = r.evader.x;
    m(row, c++) = r.evader.y;
    for (double d : r.distances) m(row, c++) = d;
    m(row, c++) = r.pursuer_separation;
    m(row, c++) = r.objective;
    m(row, c++) = r.cost;
    m(row, c++) = wrap_angle(r.evader_heading);
    m(row, c++) = wrap_angle(r.predicted_heading);
    m(row, c++) = r.nn_loss;
  }
  return m;
}

py::dict summary_dict(const SummaryMetrics& s) {
  py::dict d;
  d["captured"] = s.captured;
  d["capture_threshold"] = s.capture_threshold;
  d["capture_time"] = s.capture_time;
  d["peak_error"] = s.peak_error;
  d["mean_distance"] = s.mean_distance;
  d["final_cost"] = s.final_cost;
  d["heading_rms"] = s.heading_rms;
  d["training_failures"] = s.training_failures;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Newton-Raphson flow pursuit-evasion simulator";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<IntegrationError>(m, "IntegrationError", PyExc_RuntimeError);
  py::register_exception<SingularityError>(m, "SingularityError", PyExc_ArithmeticError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

  // dynamics
  m.def(
      "dubins_derivative",
      [](std::array<double, 3> state, double u, double speed) {
        const DubinsRate r = dubins_derivative(to_state(state), u, {speed, 1.0});
        return std::array<double, 3>{r.dpos.x, r.dpos.y, r.dheading};
      },
      py::arg("state"), py::arg("u"), py::arg("speed"),
      "(x', y', heading') of a Dubins vehicle at state (x, y, heading).");
  m.def(
      "evader_derivative",
      [](double heading, double speed) {
        EvaderParams e;
        e.speed = speed;
        return from_vec2(evader_derivative(heading, e));
      },
      py::arg("heading"), py::arg("speed"));
  m.def("wrap_angle", &wrap_angle);
  m.def(
      "rk4_step",
      [](const std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)>& f,
         const Eigen::VectorXd& x, double dt, double t) { return rk4_step(f, x, dt, t); },
      py::arg("f"), py::arg("x"), py::arg("dt"), py::arg("t") = 0.0,
      "One classical Runge-Kutta step of x' = f(x, t).");

  // controller
  m.def(
      "predict_with_sensitivity",
      [](std::array<double, 3> state, double u_held, double horizon, double speed, int substeps) {
        const PredictionBundle b =
            predict_with_sensitivity(to_state(state), u_held, horizon, {speed, 1.0}, substeps);
        py::dict d;
        d["times"] = b.times;
        d["xi"] = stack(b.xi);
        d["dxi_du"] = stack(b.dxi_du);
        return d;
      },
      py::arg("state"), py::arg("u_held"), py::arg("horizon"), py::arg("speed"),
      py::arg("substeps") = 50,
      "Constant-input prediction; returns times and (n x 3) arrays xi and dxi_du.");
  m.def(
      "memoryless_udot",
      [](const Eigen::MatrixXd& a, const Eigen::VectorXd& u, const Eigen::VectorXd& r, double alpha) {
        const OutputMap g{[a](const Eigen::VectorXd& v) -> Eigen::VectorXd { return a * v; },
                          [a](const Eigen::VectorXd&) -> Eigen::MatrixXd { return a; }};
        return memoryless_udot(g, u, r, alpha);
      },
      py::arg("A"), py::arg("u"), py::arg("r"), py::arg("alpha"),
      "Newton-Raphson flow for the linear map g(u) = A u.");
  m.def(
      "scalar_objective_udot",
      [](double g, double dg, double alpha, double jac_epsilon) {
        ControllerConfig cfg;
        cfg.jac_epsilon = jac_epsilon;
        return scalar_objective_udot(g, dg, alpha, cfg);
      },
      py::arg("gval"), py::arg("dg_du"), py::arg("alpha"), py::arg("jac_epsilon") = 1e-4);
  m.def("saturate", &saturate, py::arg("u"), py::arg("u_max"));

  // game
  m.def(
      "evasion_heading",
      [](std::array<double, 2> evader, const std::vector<std::array<double, 3>>& pursuers,
         const std::vector<double>& radii, std::array<double, 2> goal, double evade_radius_scale,
         bool goal_seeking) {
        std::vector<DubinsState> ps;
        for (const auto& p : pursuers) ps.push_back(to_state(p));
        EvaderParams e;
        e.goal = to_vec2(goal);
        e.evade_radius_scale = evade_radius_scale;
        const EvasionDecision d = evasion_heading(to_vec2(evader), ps, radii, e, goal_seeking);
        py::dict out;
        out["heading"] = d.heading;
        out["branch"] = std::string(to_string(d.branch));
        out["closest"] = d.closest;
        out["distance"] = d.distance;
        return out;
      },
      py::arg("evader"), py::arg("pursuers"), py::arg("turning_radii"), py::arg("goal"),
      py::arg("evade_radius_scale") = 3.0, py::arg("goal_seeking") = true);
  m.def(
      "stage_cost",
      [](const std::vector<double>& d, double beta1, double beta2) {
        ObjectiveWeights w;
        w.beta1 = beta1;
        w.beta2 = beta2;
        return stage_cost(d, w);
      },
      py::arg("distances"), py::arg("beta1") = 1.0, py::arg("beta2") = 1.0);
  m.def("accumulate_cost", &accumulate_cost, py::arg("prev_j"), py::arg("stage"), py::arg("t"),
        py::arg("dt"), py::arg("gamma"));

  // learning
  py::class_<MlpNetwork>(m, "MlpNetwork")
      .def_static("zeros", &MlpNetwork::zeros, py::arg("layer_sizes"))
      .def_static("random", &MlpNetwork::random, py::arg("layer_sizes"), py::arg("seed"))
      .def_readonly("layer_sizes", &MlpNetwork::layer_sizes)
      .def_readwrite("weights", &MlpNetwork::weights)
      .def_property_readonly("parameter_count", &MlpNetwork::parameter_count)
      .def("flatten", &MlpNetwork::flatten)
      .def("unflatten", &MlpNetwork::unflatten)
      .def("forward", [](const MlpNetwork& n, const Eigen::VectorXd& chi) { return mlp_forward(n, chi); })
      .def(
          "predict_heading",
          [](const MlpNetwork& n, const Eigen::VectorXd& chi, double previous) {
            return predict_evader_heading(n, chi, previous);
          },
          py::arg("chi"), py::arg("previous") = 0.0)
      .def(
          "train",
          [](MlpNetwork& n, const std::vector<Eigen::VectorXd>& chi,
             const std::vector<std::array<double, 2>>& velocity, double eta, int epochs) {
            if (chi.size() != velocity.size()) {
              throw ConfigError("samples", "chi and velocity lists differ in length");
            }
            TrainingBuffer buf(std::max<std::size_t>(1, chi.size()));
            for (std::size_t i = 0; i < chi.size(); ++i) buf.ingest(chi[i], to_vec2(velocity[i]));
            TrainingConfig cfg;
            cfg.eta = eta;
            cfg.epochs_per_update = epochs;
            const TrainResult r = backprop_update(n, buf, cfg);
            if (!r.ok) throw TrainingError(r.error);
            return r.loss;
          },
          py::arg("chi"), py::arg("velocity"), py::arg("eta") = 0.01, py::arg("epochs") = 50,
          "Full-batch gradient descent on (chi, velocity direction) pairs; returns the loss.")
      .def("save", [](const MlpNetwork& n) {
        std::ostringstream out;
        save_weights(n, out);
        return out.str();
      })
      .def_static("load", [](const std::string& text) {
        std::istringstream in(text);
        return load_weights(in);
      });
  py::register_exception<TrainingError>(m, "TrainingError", PyExc_RuntimeError);

  // scenarios
  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def_readwrite("name", &ScenarioConfig::name)
      .def_property_readonly("mode", [](const ScenarioConfig& c) { return std::string(to_string(c.mode)); })
      .def_readwrite("duration", &ScenarioConfig::duration)
      .def_readwrite("dt", &ScenarioConfig::dt)
      .def_readwrite("seed", &ScenarioConfig::seed)
      .def_property_readonly("n_pursuers", [](const ScenarioConfig& c) { return c.pursuers.size(); })
      .def_property(
          "alpha", [](const ScenarioConfig& c) { return c.controller.alpha; },
          [](ScenarioConfig& c, double v) { c.controller.alpha = v; })
      .def_property(
          "horizon", [](const ScenarioConfig& c) { return c.controller.horizon; },
          [](ScenarioConfig& c, double v) { c.controller.horizon = v; })
      .def("echo", &config_echo, "Effective configuration as key/value strings.")
      .def("__repr__", [](const ScenarioConfig& c) {
        return "<ScenarioConfig " + c.name + " (" + std::string(to_string(c.mode)) + ")>";
      });

  m.def("load_config", &load_config, py::arg("path"));
  m.def("parse_config", [](const std::string& text) { return parse_config(text); }, py::arg("text"));

  py::class_<RunResult>(m, "RunResult")
      .def_readonly("ok", &RunResult::ok)
      .def_readonly("error", &RunResult::error)
      .def_property_readonly("summary", [](const RunResult& r) { return summary_dict(r.summary); })
      .def_property_readonly("columns",
                             [](const RunResult& r) { return trace_columns(r.trace.n_pursuers); })
      .def_property_readonly("trace", [](const RunResult& r) { return trace_matrix(r.trace); })
      .def("trace_csv", [](const RunResult& r) {
        std::ostringstream out;
        write_trace_csv(out, r.trace);
        return out.str();
      });

  m.def("run_scenario", &run_scenario, py::arg("config"), py::call_guard<py::gil_scoped_release>());
}
