#include "nrpursuit/report.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

namespace nrpursuit {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  // Shortest representation that parses back to the same double.
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> trace_columns(std::size_t n) {
  std::vector<std::string> cols{"t"};
  for (std::size_t i = 1; i <= n; ++i) {
    const std::string p = "p" + std::to_string(i) + "_";
    for (const char* c : {"x", "y", "theta", "u"}) cols.push_back(p + c);
  }
  cols.push_back("evader_x");
  cols.push_back("evader_y");
  for (std::size_t i = 1; i <= n; ++i) cols.push_back("d" + std::to_string(i));
  for (const char* c : {"d_p", "g", "J", "evader_heading", "predicted_heading", "nn_loss"}) {
    cols.push_back(c);
  }
  return cols;
}

void write_trace_csv(std::ostream& out, const SimTrace& trace) {
  const auto cols = trace_columns(trace.n_pursuers);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : trace.rows) {
    std::string line = format_double(r.t);
    auto add = [&line](double v) {
      line += ',';
      line += format_double(v);
    };
    for (std::size_t i = 0; i < trace.n_pursuers; ++i) {
      add(r.pursuers[i].pos.x);
      add(r.pursuers[i].pos.y);
      add(wrap_angle(r.pursuers[i].heading));
      add(r.u[i]);
    }
    add(r.evader.x);
    add(r.evader.y);
    for (double d : r.distances) add(d);
    add(r.pursuer_separation);
    add(r.objective);
    add(r.cost);
    add(wrap_angle(r.evader_heading));
    add(wrap_angle(r.predicted_heading));
    add(r.nn_loss);
    out << line << '\n';
  }
}

std::map<std::string, std::string> config_echo(const ScenarioConfig& cfg) {
  std::map<std::string, std::string> kv;
  auto d = [&kv](const std::string& k, double v) { kv[k] = format_double(v); };
  kv["scenario.name"] = cfg.name;
  kv["scenario.mode"] = std::string(to_string(cfg.mode));
  d("scenario.duration", cfg.duration);
  d("scenario.dt", cfg.dt);
  kv["scenario.seed"] = std::to_string(cfg.seed);
  d("scenario.capture_radius_scale", cfg.capture_radius_scale);
  kv["pursuers.count"] = std::to_string(cfg.pursuers.size());
  for (std::size_t i = 0; i < cfg.pursuers.size(); ++i) {
    const std::string p = "pursuers[" + std::to_string(i) + "].";
    d(p + "speed", cfg.pursuers[i].params.speed);
    d(p + "u_max", cfg.pursuers[i].params.u_max);
    d(p + "x", cfg.pursuers[i].initial.pos.x);
    d(p + "y", cfg.pursuers[i].initial.pos.y);
    d(p + "heading", cfg.pursuers[i].initial.heading);
  }
  if (cfg.mode == ScenarioMode::agnostic_tracking) {
    d("reference.start[0]", cfg.reference.start.x);
    d("reference.start[1]", cfg.reference.start.y);
    d("reference.radius1", cfg.reference.radius1);
    d("reference.radius2", cfg.reference.radius2);
    d("reference.speed", cfg.reference.speed);
  } else {
    d("evader.speed", cfg.evader.speed);
    d("evader.start[0]", cfg.evader_start.x);
    d("evader.start[1]", cfg.evader_start.y);
    d("evader.goal[0]", cfg.evader.goal.x);
    d("evader.goal[1]", cfg.evader.goal.y);
    d("evader.evade_radius_scale", cfg.evader.evade_radius_scale);
  }
  d("controller.alpha", cfg.controller.alpha);
  d("controller.horizon", cfg.controller.horizon);
  d("controller.jac_epsilon", cfg.controller.jac_epsilon);
  kv["controller.prediction_substeps"] = std::to_string(cfg.controller.prediction_substeps);
  kv["controller.objective"] = std::string(to_string(cfg.objective));
  d("objective.beta1", cfg.weights.beta1);
  d("objective.beta2", cfg.weights.beta2);
  d("objective.beta3", cfg.weights.beta3);
  d("objective.gamma_cost", cfg.weights.gamma_cost);
  d("objective.gamma_repel", cfg.weights.gamma_repel);
  if (cfg.mode == ScenarioMode::multi_pursuer_learning) {
    std::string hidden;
    for (int h : cfg.learning.hidden_layers) hidden += (hidden.empty() ? "" : " ") + std::to_string(h);
    kv["learning.hidden"] = hidden;
    d("learning.eta", cfg.learning.eta);
    kv["learning.epochs"] = std::to_string(cfg.learning.epochs_per_update);
    d("learning.window", cfg.learning.window);
    d("learning.retrain_interval", cfg.learning.retrain_interval);
    d("learning.sample_interval", cfg.learning.sample_interval);
    d("learning.input_scale", cfg.learning.input_scale);
    kv["learning.backtrack"] = cfg.learning.backtrack ? "true" : "false";
  }
  return kv;
}

void write_summary(std::ostream& out, const ScenarioConfig& cfg, const RunResult& result,
                   const std::vector<std::string>& defaulted) {
  out << "# nrpursuit run summary\n";
  for (const auto& [k, v] : config_echo(cfg)) out << k << " = " << v << '\n';
  std::string defaults;
  for (const auto& f : defaulted) defaults += (defaults.empty() ? "" : ",") + f;
  out << "defaults_applied = " << defaults << '\n';

  const SummaryMetrics& m = result.summary;
  out << "metrics.captured = " << (m.captured ? "true" : "false") << '\n';
  out << "metrics.capture_threshold = " << format_double(m.capture_threshold) << '\n';
  out << "metrics.capture_time = " << format_double(m.capture_time) << '\n';
  out << "metrics.peak_error = " << format_double(m.peak_error) << '\n';
  out << "metrics.mean_distance = " << format_double(m.mean_distance) << '\n';
  out << "metrics.final_cost = " << format_double(m.final_cost) << '\n';
  out << "metrics.heading_rms = " << format_double(m.heading_rms) << '\n';
  out << "metrics.training_failures = " << m.training_failures << '\n';
  out << "run.rows = " << result.trace.rows.size() << '\n';
  out << "run.status = " << (result.ok ? "ok" : "error") << '\n';
  if (!result.ok) out << "run.error = " << result.error << '\n';
}

std::map<std::string, std::string> read_key_values(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

}  // namespace nrpursuit
