"""End-to-end field simulation: config schema, engine, and report exports."""

from .config import (
    DAY_S,
    DEFAULT_DAY,
    ScenarioConfig,
    SoilParams,
    WeatherSegment,
    config_from_dict,
    config_to_dict,
    load_config,
    save_config,
)
from .engine import BASELINE_SLOTS_S, NODE_ID, compare_automation, run_scenario
from .report import (
    ChannelUsage,
    ComparisonReport,
    PredictionOutcome,
    SimReport,
    export_comparison,
    export_report,
    summarize,
    write_trace_csv,
)

__all__ = [
    "BASELINE_SLOTS_S",
    "ChannelUsage",
    "ComparisonReport",
    "DAY_S",
    "DEFAULT_DAY",
    "NODE_ID",
    "PredictionOutcome",
    "ScenarioConfig",
    "SimReport",
    "SoilParams",
    "WeatherSegment",
    "compare_automation",
    "config_from_dict",
    "config_to_dict",
    "export_comparison",
    "export_report",
    "load_config",
    "run_scenario",
    "save_config",
    "summarize",
    "write_trace_csv",
]
