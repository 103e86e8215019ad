#pragma once

// Evader strategy, game cost and the pursuit objectives fed to the controller.

#include <span>
#include <string_view>
#include <vector>

#include "nrpursuit/controller.hpp"
#include "nrpursuit/dynamics.hpp"

namespace nrpursuit {

struct ObjectiveWeights {
  double beta1 = 1.0;
  double beta2 = 1.0;
  double beta3 = 1.0;
  double gamma_cost = 0.1;   // 1/s, discount of the game cost
  double gamma_repel = 0.1;  // 1/m, decay of the pursuer repulsion term

  void validate() const;
};

enum class EvasionBranch { goal_seek, radial_flee, tangential_escape };

std::string_view to_string(EvasionBranch b);

struct EvasionDecision {
  double heading = 0.0;
  EvasionBranch branch = EvasionBranch::goal_seek;
  std::size_t closest = 0;  // index of the pursuer the decision reacts to
  double distance = 0.0;    // distance to that pursuer
};

/// Game-theoretic evasion law against the closest pursuer.
///
/// Beyond evade_radius_scale * R_P the evader heads for its goal. Between R_P
/// and that radius it flees along the pursuer-to-evader ray. Inside R_P it
/// turns +-90 degrees off that ray, picking the sign of
/// (cos th_p, sin th_p) x (evader - pursuer) and +90 degrees on a tie. With
/// goal_seeking = false the goal branch is never taken; this is the model the
/// pursuers use internally. Coincident positions fall back to the goal heading.
EvasionDecision evasion_heading(const Vec2& evader, std::span<const DubinsState> pursuers,
                                std::span<const double> turning_radii, const EvaderParams& e,
                                bool goal_seeking = true);

/// beta1 * sum d_i^2 + beta2 * sum_{i<j} d_i^2 d_j^2 / (d_i^2 + d_j^2).
/// The ratio is taken as 0 when both distances vanish.
double stage_cost(std::span<const double> distances, const ObjectiveWeights& w);
double stage_cost(double d1, double d2, const ObjectiveWeights& w);

/// Left-endpoint quadrature of the discounted cost: prev + exp(-gamma t) L dt.
double accumulate_cost(double prev_j, double stage, double t, double dt, double gamma);

struct ObjectiveValue {
  double value = 0.0;
  std::vector<double> grad;  // d value / d u_held of each pursuer
};

/// Integral over the prediction window of stage cost plus
/// beta3 * exp(-gamma_repel * d_ij) for every pursuer pair, by the trapezoidal
/// rule on the shared prediction grid. Each gradient entry is taken through the
/// sensitivity of that pursuer's own prediction; the evader path does not
/// depend on any input.
ObjectiveValue cooperative_objective(std::span<const PredictionBundle> bundles,
                                     std::span<const Vec2> evader_path,
                                     const ObjectiveWeights& w);

/// Squared distance between the predicted pursuer and evader at the end of
/// the window.
ObjectiveValue single_pursuer_objective(const PredictionBundle& bundle,
                                        std::span<const Vec2> evader_path);

/// Straight-line extrapolation at a constant heading, sampled on `times`
/// (times[0] is the current time).
std::vector<Vec2> predict_evader_path(const Vec2& evader_pos, double heading, double speed,
                                      std::span<const double> times);

}  // namespace nrpursuit
