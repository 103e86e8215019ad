"""Newton-Raphson flow pursuit-evasion simulator (Python bindings)."""

from ._core import (
    ConfigError,
    DomainError,
    IntegrationError,
    MlpNetwork,
    RunResult,
    ScenarioConfig,
    SingularityError,
    TrainingError,
    accumulate_cost,
    dubins_derivative,
    evader_derivative,
    evasion_heading,
    load_config,
    memoryless_udot,
    parse_config,
    predict_with_sensitivity,
    rk4_step,
    run_scenario,
    saturate,
    scalar_objective_udot,
    stage_cost,
    wrap_angle,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "IntegrationError",
    "MlpNetwork",
    "RunResult",
    "ScenarioConfig",
    "SingularityError",
    "TrainingError",
    "accumulate_cost",
    "dubins_derivative",
    "evader_derivative",
    "evasion_heading",
    "load_config",
    "memoryless_udot",
    "parse_config",
    "predict_with_sensitivity",
    "rk4_step",
    "run_scenario",
    "saturate",
    "scalar_objective_udot",
    "stage_cost",
    "wrap_angle",
]
