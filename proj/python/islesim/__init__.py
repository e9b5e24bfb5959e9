"""Islanded-feeder PV stability simulator.

Thin python surface over the C++ core: build a scenario, run it, inspect
per-bus voltage/frequency/RoCoF traces and scenario metrics, or sweep one
parameter across values the way the case studies do.
"""

from ._core import (
    EventSchedule,
    InverterParams,
    MetricsSummary,
    ModuleParams,
    OperatingEnv,
    OracleError,
    RelaySettings,
    RunResult,
    ScenarioSpec,
    SwingParams,
    SwingState,
    ValidationError,
    compute_metrics,
    default_scenario,
    load_scenario,
    mpp_power,
    run_scenario,
    run_sweep,
    scenario_digest,
    scenario_echo_json,
    swing_step,
    write_outputs,
    __version__,
)

__all__ = [
    "EventSchedule",
    "InverterParams",
    "MetricsSummary",
    "ModuleParams",
    "OperatingEnv",
    "OracleError",
    "RelaySettings",
    "RunResult",
    "ScenarioSpec",
    "SwingParams",
    "SwingState",
    "ValidationError",
    "compute_metrics",
    "default_scenario",
    "load_scenario",
    "mpp_power",
    "run_scenario",
    "run_sweep",
    "scenario_digest",
    "scenario_echo_json",
    "swing_step",
    "write_outputs",
    "__version__",
]
