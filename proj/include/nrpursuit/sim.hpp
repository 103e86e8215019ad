#pragma once

// Closed-loop pursuit-evasion scenarios.
//
// Each step: evader decision (true law) and the pursuers' estimate of it,
// evader path prediction, per-pursuer constant-input prediction with
// sensitivities, objective and Newton-flow control rates, one RK4 step of
// the plant and controller state together, saturation, and (learning mode)
// observation logging and periodic network retraining.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nrpursuit/controller.hpp"
#include "nrpursuit/dynamics.hpp"
#include "nrpursuit/game.hpp"
#include "nrpursuit/learning.hpp"
#include "nrpursuit/metrics.hpp"
#include "nrpursuit/reference.hpp"

namespace nrpursuit {

enum class ScenarioMode {
  agnostic_tracking,
  single_pursuer_adversarial,
  multi_pursuer_model_based,
  multi_pursuer_learning,
};

enum class ObjectiveKind { terminal, cooperative };

std::string_view to_string(ScenarioMode m);
std::string_view to_string(ObjectiveKind k);
/// Returns false for unknown names.
bool parse_mode(std::string_view name, ScenarioMode& out);
bool parse_objective_kind(std::string_view name, ObjectiveKind& out);
ObjectiveKind default_objective(ScenarioMode m);

struct PursuerSetup {
  PursuerParams params;
  DubinsState initial;
};

struct ScenarioConfig {
  std::string name = "scenario";
  ScenarioMode mode = ScenarioMode::single_pursuer_adversarial;
  double duration = 60.0;  // s
  double dt = 0.01;        // s
  std::uint64_t seed = 1;

  std::vector<PursuerSetup> pursuers;
  EvaderParams evader;
  Vec2 evader_start{20.0, 0.0};

  ControllerConfig controller;
  ObjectiveKind objective = ObjectiveKind::terminal;
  ObjectiveWeights weights;
  TrainingConfig learning;
  ReferenceSpec reference;  // agnostic_tracking only

  double capture_radius_scale = 2.0;  // capture threshold in units of the largest R_P

  /// Number of integration steps; throws when duration is not a multiple of dt.
  std::size_t step_count() const;
  double capture_threshold() const;
  void validate() const;
};

struct RunResult {
  SimTrace trace;
  SummaryMetrics summary;
  bool ok = true;
  std::string error;           // set when the run stopped early
  std::size_t failed_step = 0;
};

/// Deterministic for a given config; never throws for runtime failures
/// (partial trace plus error in the result). Throws ConfigError for an
/// invalid config.
RunResult run_scenario(const ScenarioConfig& cfg);

/// Relative positions evader - pursuer_i, stacked, times `scale`.
Eigen::VectorXd relative_positions(const GlobalState& x, double scale = 1.0);

}  // namespace nrpursuit
