#include "nrpursuit/game.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace nrpursuit {

void ObjectiveWeights::validate() const {
  auto nonneg = [](double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0) throw ConfigError(name, "must be finite and >= 0");
  };
  nonneg(beta1, "objective.beta1");
  nonneg(beta2, "objective.beta2");
  nonneg(beta3, "objective.beta3");
  if (!std::isfinite(gamma_cost) || !(gamma_cost > 0.0)) {
    throw ConfigError("objective.gamma_cost", "must be > 0");
  }
  if (!std::isfinite(gamma_repel) || !(gamma_repel > 0.0)) {
    throw ConfigError("objective.gamma_repel", "must be > 0");
  }
}

std::string_view to_string(EvasionBranch b) {
  switch (b) {
    case EvasionBranch::goal_seek:
      return "goal_seek";
    case EvasionBranch::radial_flee:
      return "radial_flee";
    case EvasionBranch::tangential_escape:
      return "tangential_escape";
  }
  return "unknown";
}

EvasionDecision evasion_heading(const Vec2& evader, std::span<const DubinsState> pursuers,
                                std::span<const double> turning_radii, const EvaderParams& e,
                                bool goal_seeking) {
  if (pursuers.empty()) throw ConfigError("pursuers", "at least one pursuer required");
  if (turning_radii.size() != pursuers.size()) {
    throw ConfigError("turning_radii", "one turning radius per pursuer required");
  }

  EvasionDecision out;
  out.distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pursuers.size(); ++i) {
    const double d = (evader - pursuers[i].pos).norm();
    if (d < out.distance) {
      out.distance = d;
      out.closest = i;
    }
  }

  const DubinsState& p = pursuers[out.closest];
  const double radius = turning_radii[out.closest];
  const Vec2 rel = evader - p.pos;
  const Vec2 to_goal = e.goal - evader;
  const double goal_heading = std::atan2(to_goal.y, to_goal.x);

  if (out.distance == 0.0 || (goal_seeking && out.distance > e.evade_radius_scale * radius)) {
    out.heading = goal_heading;
    out.branch = EvasionBranch::goal_seek;
    return out;
  }
  const double radial = std::atan2(rel.y, rel.x);
  if (out.distance > radius) {
    out.heading = radial;
    out.branch = EvasionBranch::radial_flee;
    return out;
  }
  const double side = cross({std::cos(p.heading), std::sin(p.heading)}, rel);
  out.heading = radial + (side < 0.0 ? -0.5 : 0.5) * std::numbers::pi;
  out.branch = EvasionBranch::tangential_escape;
  return out;
}

double stage_cost(std::span<const double> distances, const ObjectiveWeights& w) {
  double sum_sq = 0.0;
  double coop = 0.0;
  for (std::size_t i = 0; i < distances.size(); ++i) {
    const double si = distances[i] * distances[i];
    sum_sq += si;
    for (std::size_t j = i + 1; j < distances.size(); ++j) {
      const double sj = distances[j] * distances[j];
      if (si + sj > 0.0) coop += si * sj / (si + sj);
    }
  }
  return w.beta1 * sum_sq + w.beta2 * coop;
}

double stage_cost(double d1, double d2, const ObjectiveWeights& w) {
  const double d[2] = {d1, d2};
  return stage_cost(std::span<const double>(d), w);
}

double accumulate_cost(double prev_j, double stage, double t, double dt, double gamma) {
  return prev_j + std::exp(-gamma * t) * stage * dt;
}

namespace {

std::vector<double> trapezoid_weights(std::span<const double> times) {
  std::vector<double> w(times.size(), 0.0);
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    const double h = times[k + 1] - times[k];
    w[k] += 0.5 * h;
    w[k + 1] += 0.5 * h;
  }
  return w;
}

}  // namespace

ObjectiveValue cooperative_objective(std::span<const PredictionBundle> bundles,
                                     std::span<const Vec2> evader_path,
                                     const ObjectiveWeights& w) {
  const std::size_t n = bundles.size();
  if (n == 0) throw ConfigError("bundles", "at least one pursuer prediction required");
  const std::size_t m = evader_path.size();
  for (const auto& b : bundles) {
    if (b.size() != m) {
      throw ConfigError("prediction_grid", "pursuer and evader predictions have different grids");
    }
    for (std::size_t k = 0; k < m; ++k) {
      if (std::abs(b.times[k] - bundles[0].times[k]) > 1e-12) {
        throw ConfigError("prediction_grid", "pursuer predictions have different time grids");
      }
    }
  }

  const std::vector<double> quad = trapezoid_weights(bundles[0].times);
  ObjectiveValue out;
  out.grad.assign(n, 0.0);
  std::vector<double> s(n);
  std::vector<Vec2> rel(n);

  for (std::size_t k = 0; k < m; ++k) {
    const Vec2& e = evader_path[k];
    for (std::size_t i = 0; i < n; ++i) {
      rel[i] = bundles[i].position(k) - e;
      s[i] = rel[i].squared_norm();
    }

    double integrand = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 dp_i = bundles[i].position_sensitivity(k);
      const double ds_i = 2.0 * dot(rel[i], dp_i);
      double dL_ds_i = w.beta1;
      double grad_i = 0.0;
      integrand += w.beta1 * s[i];
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double sum = s[i] + s[j];
        if (sum > 0.0) dL_ds_i += w.beta2 * s[j] * s[j] / (sum * sum);

        const Vec2 sep = bundles[i].position(k) - bundles[j].position(k);
        const double dp = sep.norm();
        const double repel = w.beta3 * std::exp(-w.gamma_repel * dp);
        if (j > i) {
          if (sum > 0.0) integrand += w.beta2 * s[i] * s[j] / sum;
          integrand += repel;
        }
        if (dp > 0.0) grad_i += -w.gamma_repel * repel * dot(sep, dp_i) / dp;
      }
      grad_i += dL_ds_i * ds_i;
      out.grad[i] += quad[k] * grad_i;
    }
    out.value += quad[k] * integrand;
  }
  return out;
}

ObjectiveValue single_pursuer_objective(const PredictionBundle& bundle,
                                        std::span<const Vec2> evader_path) {
  if (bundle.size() == 0 || evader_path.size() != bundle.size()) {
    throw ConfigError("prediction_grid", "pursuer and evader predictions have different grids");
  }
  const std::size_t last = bundle.size() - 1;
  const Vec2 rel = bundle.position(last) - evader_path[last];
  ObjectiveValue out;
  out.value = rel.squared_norm();
  out.grad = {2.0 * dot(rel, bundle.position_sensitivity(last))};
  return out;
}

std::vector<Vec2> predict_evader_path(const Vec2& evader_pos, double heading, double speed,
                                      std::span<const double> times) {
  std::vector<Vec2> path;
  path.reserve(times.size());
  if (times.empty()) return path;
  const Vec2 v{speed * std::cos(heading), speed * std::sin(heading)};
  for (double t : times) path.push_back(evader_pos + (t - times[0]) * v);
  return path;
}

}  // namespace nrpursuit
