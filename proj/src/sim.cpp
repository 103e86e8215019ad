#include "nrpursuit/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nrpursuit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ModeName {
  ScenarioMode mode;
  std::string_view name;
};

constexpr ModeName kModes[] = {
    {ScenarioMode::agnostic_tracking, "agnostic_tracking"},
    {ScenarioMode::single_pursuer_adversarial, "single_pursuer_adversarial"},
    {ScenarioMode::multi_pursuer_model_based, "multi_pursuer_model_based"},
    {ScenarioMode::multi_pursuer_learning, "multi_pursuer_learning"},
};

}  // namespace

std::string_view to_string(ScenarioMode m) {
  for (const auto& e : kModes) {
    if (e.mode == m) return e.name;
  }
  return "unknown";
}

std::string_view to_string(ObjectiveKind k) {
  return k == ObjectiveKind::terminal ? "terminal" : "cooperative";
}

bool parse_mode(std::string_view name, ScenarioMode& out) {
  for (const auto& e : kModes) {
    if (e.name == name) {
      out = e.mode;
      return true;
    }
  }
  return false;
}

bool parse_objective_kind(std::string_view name, ObjectiveKind& out) {
  if (name == "terminal") {
    out = ObjectiveKind::terminal;
  } else if (name == "cooperative") {
    out = ObjectiveKind::cooperative;
  } else {
    return false;
  }
  return true;
}

ObjectiveKind default_objective(ScenarioMode m) {
  switch (m) {
    case ScenarioMode::multi_pursuer_model_based:
    case ScenarioMode::multi_pursuer_learning:
      return ObjectiveKind::cooperative;
    default:
      return ObjectiveKind::terminal;
  }
}

std::size_t ScenarioConfig::step_count() const {
  const double ratio = duration / dt;
  const double n = std::round(ratio);
  if (std::abs(ratio - n) > 1e-6 * std::max(1.0, ratio)) {
    throw ConfigError("scenario.duration", "must be an integer multiple of scenario.dt");
  }
  return static_cast<std::size_t>(n);
}

double ScenarioConfig::capture_threshold() const {
  double r = 0.0;
  for (const auto& p : pursuers) r = std::max(r, p.params.turning_radius());
  return capture_radius_scale * r;
}

void ScenarioConfig::validate() const {
  if (!std::isfinite(duration) || duration < 0.0) {
    throw ConfigError("scenario.duration", "must be >= 0");
  }
  if (!std::isfinite(dt) || !(dt > 0.0)) throw ConfigError("scenario.dt", "must be > 0");
  step_count();
  if (pursuers.empty()) throw ConfigError("pursuers", "at least one pursuer required");
  for (std::size_t i = 0; i < pursuers.size(); ++i) {
    const auto& p = pursuers[i];
    const std::string field = "pursuers[" + std::to_string(i) + "]";
    if (!(p.params.speed > 0.0) || !std::isfinite(p.params.speed)) {
      throw ConfigError(field + ".speed", "must be > 0");
    }
    if (!(p.params.u_max > 0.0) || !std::isfinite(p.params.u_max)) {
      throw ConfigError(field + ".u_max", "must be > 0");
    }
    if (!p.initial.finite()) throw ConfigError(field, "initial state must be finite");
  }
  const std::size_t n = pursuers.size();
  switch (mode) {
    case ScenarioMode::agnostic_tracking:
    case ScenarioMode::single_pursuer_adversarial:
      if (n != 1) throw ConfigError("pursuers", std::string(to_string(mode)) + " needs exactly one pursuer");
      break;
    case ScenarioMode::multi_pursuer_model_based:
    case ScenarioMode::multi_pursuer_learning:
      if (n < 2) throw ConfigError("pursuers", std::string(to_string(mode)) + " needs at least two pursuers");
      break;
  }
  if (objective == ObjectiveKind::terminal && n != 1) {
    throw ConfigError("controller.objective", "terminal objective supports one pursuer only");
  }
  if (mode == ScenarioMode::agnostic_tracking) {
    reference.validate();
  } else {
    if (!(evader.speed > 0.0) || !std::isfinite(evader.speed)) {
      throw ConfigError("evader.speed", "must be > 0");
    }
    if (!evader.goal.finite()) throw ConfigError("evader.goal", "must be finite");
    if (!evader_start.finite()) throw ConfigError("evader.start", "must be finite");
    if (!(evader.evade_radius_scale > 0.0) || !std::isfinite(evader.evade_radius_scale)) {
      throw ConfigError("evader.evade_radius_scale", "must be > 0");
    }
  }
  controller.validate();
  weights.validate();
  if (mode == ScenarioMode::multi_pursuer_learning) learning.validate();
  if (!(capture_radius_scale > 0.0)) {
    throw ConfigError("scenario.capture_radius_scale", "must be > 0");
  }
}

Eigen::VectorXd relative_positions(const GlobalState& x, double scale) {
  Eigen::VectorXd chi(2 * x.pursuers.size());
  for (std::size_t i = 0; i < x.pursuers.size(); ++i) {
    const Vec2 d = x.evader - x.pursuers[i].pos;
    chi[2 * i] = scale * d.x;
    chi[2 * i + 1] = scale * d.y;
  }
  return chi;
}

namespace {

struct ControlEval {
  double objective = 0.0;
  std::vector<double> udot;
};

class ScenarioRunner {
 public:
  explicit ScenarioRunner(const ScenarioConfig& cfg)
      : cfg_(cfg),
        n_(cfg.pursuers.size()),
        buffer_(cfg.learning.buffer_capacity()) {
    for (const auto& p : cfg.pursuers) {
      params_.push_back(p.params);
      radii_.push_back(p.params.turning_radius());
    }
    learning_ = cfg.mode == ScenarioMode::multi_pursuer_learning;
    agnostic_ = cfg.mode == ScenarioMode::agnostic_tracking;
    if (learning_) {
      std::vector<int> sizes{static_cast<int>(2 * n_)};
      sizes.insert(sizes.end(), cfg.learning.hidden_layers.begin(),
                   cfg.learning.hidden_layers.end());
      sizes.push_back(2);
      net_ = MlpNetwork::random(sizes, cfg.seed);
      sample_every_ = steps_per(cfg.learning.sample_interval);
      retrain_every_ = steps_per(cfg.learning.retrain_interval);
    }
  }

  RunResult run() {
    RunResult result;
    SimTrace& trace = result.trace;
    trace.n_pursuers = n_;
    trace.capture_threshold = cfg_.capture_threshold();
    trace.learning = learning_;

    const std::size_t steps = cfg_.step_count();
    trace.rows.reserve(steps + 1);

    GlobalState x;
    for (const auto& p : cfg_.pursuers) x.pursuers.push_back(p.initial);
    x.evader = agnostic_ ? reference_trajectory(cfg_.reference, 0.0) : cfg_.evader_start;
    std::vector<double> u(n_, 0.0);
    double cost = 0.0;

    std::size_t k = 0;
    try {
      for (;; ++k) {
        const double t = static_cast<double>(k) * cfg_.dt;
        const double true_heading = evader_heading(x, t);
        const double est_heading = estimated_heading(x, t);
        const ControlEval ctl = control(x, u, t, est_heading);

        TraceRow row = make_row(x, u, t, ctl.objective, cost, true_heading, est_heading);
        const double stage = stage_cost(row.distances, cfg_.weights);
        trace.rows.push_back(std::move(row));
        if (k == steps) break;

        const GlobalState before = x;
        step(x, u, t, static_cast<double>(k + 1) * cfg_.dt, true_heading, est_heading);
        cost = accumulate_cost(cost, stage, t, cfg_.dt, cfg_.weights.gamma_cost);

        if (learning_) learn(before, x, k, t, result.summary, trace);
      }
    } catch (const std::exception& e) {
      result.ok = false;
      result.failed_step = k;
      std::ostringstream msg;
      msg << "step " << k << ": " << e.what();
      result.error = msg.str();
    }

    const std::size_t failures = result.summary.training_failures;
    result.summary = compute_summary(trace);
    result.summary.training_failures = failures;
    return result;
  }

 private:
  std::size_t steps_per(double interval) const {
    const auto s = static_cast<std::size_t>(std::llround(interval / cfg_.dt));
    return std::max<std::size_t>(1, s);
  }

  double evader_heading(const GlobalState& x, double t) const {
    if (agnostic_) return reference_heading(cfg_.reference, t);
    return evasion_heading(x.evader, x.pursuers, radii_, cfg_.evader, true).heading;
  }

  double estimated_heading(const GlobalState& x, double t) {
    if (agnostic_) return reference_heading(cfg_.reference, t);
    if (!learning_) {
      return evasion_heading(x.evader, x.pursuers, radii_, cfg_.evader, false).heading;
    }
    if (!trained_) return observed_heading_;
    nn_heading_ = predict_evader_heading(
        net_, relative_positions(x, cfg_.learning.input_scale), nn_heading_);
    return nn_heading_;
  }

  std::vector<double> prediction_times(double t) const {
    const int m = cfg_.controller.prediction_substeps;
    const double h = cfg_.controller.horizon / m;
    std::vector<double> times(static_cast<std::size_t>(m) + 1);
    for (int j = 0; j <= m; ++j) times[static_cast<std::size_t>(j)] = t + j * h;
    return times;
  }

  ControlEval control(const GlobalState& x, const std::vector<double>& u, double t,
                      double est_heading) const {
    std::vector<PredictionBundle> bundles;
    bundles.reserve(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      bundles.push_back(predict_with_sensitivity(x.pursuers[i], saturate(u[i], params_[i].u_max),
                                                 cfg_.controller.horizon, params_[i],
                                                 cfg_.controller.prediction_substeps, t));
    }
    const std::vector<double>& times = bundles.front().times;
    std::vector<Vec2> evader_path;
    if (agnostic_) {
      evader_path.reserve(times.size());
      for (double tau : times) evader_path.push_back(reference_trajectory(cfg_.reference, tau));
    } else {
      evader_path = predict_evader_path(x.evader, est_heading, cfg_.evader.speed, times);
    }

    const ObjectiveValue obj = cfg_.objective == ObjectiveKind::terminal
                                   ? single_pursuer_objective(bundles.front(), evader_path)
                                   : cooperative_objective(bundles, evader_path, cfg_.weights);
    ControlEval out;
    out.objective = obj.value;
    out.udot.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      out.udot[i] = scalar_objective_udot(obj.value, obj.grad[i], cfg_.controller.alpha,
                                          cfg_.controller);
    }
    return out;
  }

  // One RK4 step of (plant state, controller state). Both evader headings are
  // held over the step; u is saturated wherever it enters the plant.
  void step(GlobalState& x, std::vector<double>& u, double t, double t_next,
            double true_heading, double est_heading) const {
    const Eigen::Index dim = static_cast<Eigen::Index>(x.dimension());
    Eigen::VectorXd z(dim + static_cast<Eigen::Index>(n_));
    z.head(dim) = x.to_vector();
    for (std::size_t i = 0; i < n_; ++i) z[dim + static_cast<Eigen::Index>(i)] = u[i];

    auto rhs = [&](const Eigen::VectorXd& zs, double ts) {
      GlobalState xs = GlobalState::from_vector(zs.head(dim), n_);
      if (agnostic_) xs.evader = reference_trajectory(cfg_.reference, ts);
      std::vector<double> us(n_);
      for (std::size_t i = 0; i < n_; ++i) {
        us[i] = saturate(zs[dim + static_cast<Eigen::Index>(i)], params_[i].u_max);
      }
      const ControlEval ctl = control(xs, us, ts, est_heading);
      Eigen::VectorXd dz(zs.size());
      dz.head(dim) = global_derivative(xs, us, true_heading, params_, evader_for_derivative());
      for (std::size_t i = 0; i < n_; ++i) dz[dim + static_cast<Eigen::Index>(i)] = ctl.udot[i];
      return dz;
    };
    z = rk4_step(rhs, z, cfg_.dt, t);

    x = GlobalState::from_vector(z.head(dim), n_);
    if (agnostic_) x.evader = reference_trajectory(cfg_.reference, t_next);
    for (std::size_t i = 0; i < n_; ++i) {
      u[i] = saturate(z[dim + static_cast<Eigen::Index>(i)], params_[i].u_max);
    }
  }

  EvaderParams evader_for_derivative() const {
    if (!agnostic_) return cfg_.evader;
    EvaderParams e = cfg_.evader;
    e.speed = cfg_.reference.speed;
    return e;
  }

  void learn(const GlobalState& before, const GlobalState& after, std::size_t k, double t,
             SummaryMetrics& summary, SimTrace& trace) {
    const Vec2 velocity = (1.0 / cfg_.dt) * (after.evader - before.evader);
    if (velocity.norm() > 0.0) observed_heading_ = std::atan2(velocity.y, velocity.x);
    if (k % sample_every_ == 0) {
      buffer_.ingest(relative_positions(before, cfg_.learning.input_scale), velocity);
    }
    if ((k + 1) % retrain_every_ == 0 && !buffer_.empty()) {
      const TrainResult r = backprop_update(net_, buffer_, cfg_.learning);
      if (!r.ok) {
        ++summary.training_failures;
      } else {
        last_loss_ = r.loss;
        if (!trained_) {
          trained_ = true;
          nn_heading_ = observed_heading_;
          trace.first_training_time = t + cfg_.dt;
        }
      }
    }
  }

  TraceRow make_row(const GlobalState& x, const std::vector<double>& u, double t,
                    double objective, double cost, double true_heading,
                    double est_heading) const {
    TraceRow row;
    row.t = t;
    row.pursuers = x.pursuers;
    row.u = u;
    row.evader = x.evader;
    row.distances.reserve(n_);
    for (const auto& p : x.pursuers) row.distances.push_back((x.evader - p.pos).norm());
    row.pursuer_separation = kNaN;
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i + 1; j < n_; ++j) {
        const double d = (x.pursuers[i].pos - x.pursuers[j].pos).norm();
        row.pursuer_separation = std::isnan(row.pursuer_separation)
                                     ? d
                                     : std::min(row.pursuer_separation, d);
      }
    }
    row.objective = objective;
    row.cost = cost;
    row.evader_heading = true_heading;
    row.predicted_heading = est_heading;
    row.nn_loss = last_loss_;
    return row;
  }

  const ScenarioConfig& cfg_;
  std::size_t n_;
  std::vector<PursuerParams> params_;
  std::vector<double> radii_;
  bool learning_ = false;
  bool agnostic_ = false;

  MlpNetwork net_;
  TrainingBuffer buffer_;
  std::size_t sample_every_ = 1;
  std::size_t retrain_every_ = 1;
  bool trained_ = false;
  double observed_heading_ = 0.0;
  double nn_heading_ = 0.0;
  double last_loss_ = kNaN;
};

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  ScenarioRunner runner(cfg);
  return runner.run();
}

}  // namespace nrpursuit
