"""Scenario configuration: weather timeline, soil/node parameters, JSON I/O.

A scenario file is a JSON object whose keys mirror ScenarioConfig's fields.
Everything has a default, so `{}` is a valid file describing the standard
24-hour field day. Times inside the file are seconds; duration is hours.

Schema (all keys optional):

    {
      "duration_h": 24.0,
      "tick_s": 1.0,
      "weather_timeline": [
        {"start_s": 0, "end_s": 18000, "condition": "shady_dark"},
        ...
      ],
      "field_size_m": [50.0, 50.0],
      "node_placements": [[25.0, 25.0]],
      "crop_name": "default",
      "soil": {
        "pump_rate_per_min": 0.5,
        "et_rates_per_min": {"sunny": 0.12, "moderately_sunny": 0.08,
                              "overcast": 0.04, "shady_dark": 0.02}
      },
      "initial_moisture_pct": 50.0,
      "initial_charge_fraction": 0.2,
      "load_current_ma": 80.0,
      "battery_capacity_mah": 7000.0,
      "automation_enabled": true,
      "capture_time_s": 36000.0,
      "seed": 42
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Mapping

from ..controller import LOOP_DELAY_MS
from ..power import WeatherCondition
from ..sensors import ET_RATE_PER_MIN, PUMP_RATE_PER_MIN

DAY_S = 86400.0


@dataclass(frozen=True)
class WeatherSegment:
    """Half-open [start_s, end_s) span of one sky condition."""

    start_s: float
    end_s: float
    condition: WeatherCondition

    def __post_init__(self) -> None:
        if self.start_s < 0 or self.end_s <= self.start_s:
            raise ValueError("weather segment must have start_s >= 0 and end_s > start_s")


# Field-day slots: dark night, overcast dawn, warming morning, peak sun
# over midday, fading afternoon, dark evening.
DEFAULT_DAY: tuple[WeatherSegment, ...] = (
    WeatherSegment(0.0, 18000.0, WeatherCondition.SHADY_DARK),
    WeatherSegment(18000.0, 25200.0, WeatherCondition.OVERCAST),
    WeatherSegment(25200.0, 39600.0, WeatherCondition.MODERATELY_SUNNY),
    WeatherSegment(39600.0, 54000.0, WeatherCondition.SUNNY),
    WeatherSegment(54000.0, 61200.0, WeatherCondition.OVERCAST),
    WeatherSegment(61200.0, 66600.0, WeatherCondition.MODERATELY_SUNNY),
    WeatherSegment(66600.0, DAY_S, WeatherCondition.SHADY_DARK),
)


@dataclass(frozen=True)
class SoilParams:
    pump_rate_per_min: float = PUMP_RATE_PER_MIN
    et_rates_per_min: Mapping[WeatherCondition, float] = field(
        default_factory=lambda: dict(ET_RATE_PER_MIN)
    )

    def __post_init__(self) -> None:
        if self.pump_rate_per_min <= 0:
            raise ValueError("pump_rate_per_min must be positive")
        rates = dict(self.et_rates_per_min)
        for condition in WeatherCondition:
            if condition not in rates:
                raise ValueError(f"et_rates_per_min missing {condition.value!r}")
            if rates[condition] < 0:
                raise ValueError("evapotranspiration rates must be non-negative")
        object.__setattr__(self, "et_rates_per_min", rates)


@dataclass(frozen=True)
class ScenarioConfig:
    duration_h: float = 24.0
    tick_s: float = 1.0
    weather_timeline: tuple[WeatherSegment, ...] = DEFAULT_DAY
    field_size_m: tuple[float, float] = (50.0, 50.0)
    node_placements: tuple[tuple[float, float], ...] = ((25.0, 25.0),)
    crop_name: str = "default"
    soil: SoilParams = field(default_factory=SoilParams)
    initial_moisture_pct: float = 50.0
    initial_charge_fraction: float = 0.2
    load_current_ma: float = 80.0
    battery_capacity_mah: float = 7000.0
    automation_enabled: bool = True
    capture_time_s: float = 36000.0
    seed: int = 42

    def __post_init__(self) -> None:
        if self.duration_h < 0:
            raise ValueError("duration_h must be non-negative")
        if self.tick_s <= 0:
            raise ValueError("tick_s must be positive")
        if self.tick_s > LOOP_DELAY_MS / 1000.0:
            raise ValueError("tick_s must not exceed the controller loop delay")
        duration_s = self.duration_s
        ticks = round(duration_s / self.tick_s)
        if abs(duration_s - ticks * self.tick_s) > 1e-9:
            raise ValueError("duration must be a whole number of ticks")
        self._check_timeline(duration_s)
        w, h = self.field_size_m
        if w <= 0 or h <= 0:
            raise ValueError("field_size_m must be positive in both directions")
        for x, y in self.node_placements:
            if not (0.0 <= x <= w and 0.0 <= y <= h):
                raise ValueError(f"node placement ({x}, {y}) lies outside the field")
        if not self.crop_name:
            raise ValueError("crop_name must be non-empty")
        if not 0.0 <= self.initial_moisture_pct <= 100.0:
            raise ValueError("initial_moisture_pct must lie in [0, 100]")
        if not 0.0 <= self.initial_charge_fraction <= 1.0:
            raise ValueError("initial_charge_fraction must lie in [0, 1]")
        if self.load_current_ma < 0:
            raise ValueError("load_current_ma must be non-negative")
        if self.battery_capacity_mah <= 0:
            raise ValueError("battery_capacity_mah must be positive")
        if not 0.0 <= self.capture_time_s < DAY_S:
            raise ValueError("capture_time_s must lie within one day")

    def _check_timeline(self, duration_s: float) -> None:
        timeline = self.weather_timeline
        if duration_s == 0.0:
            return  # nothing to cover
        if not timeline:
            raise ValueError("weather_timeline must not be empty")
        if timeline[0].start_s != 0.0:
            raise ValueError("weather_timeline must start at 0")
        for prev, cur in zip(timeline, timeline[1:]):
            if cur.start_s != prev.end_s:
                raise ValueError(
                    "weather segments must be contiguous "
                    f"(gap or overlap at {cur.start_s})"
                )
        if timeline[-1].end_s < duration_s:
            raise ValueError("weather_timeline must cover the full duration")

    @property
    def duration_s(self) -> float:
        return self.duration_h * 3600.0

    @property
    def ticks(self) -> int:
        return round(self.duration_s / self.tick_s)

    def condition_at(self, time_s: float) -> WeatherCondition:
        for segment in self.weather_timeline:
            if segment.start_s <= time_s < segment.end_s:
                return segment.condition
        # the final segment closes its right edge so duration_s itself resolves
        if self.weather_timeline and time_s == self.weather_timeline[-1].end_s:
            return self.weather_timeline[-1].condition
        raise ValueError(f"no weather segment covers t={time_s}")


def config_to_dict(config: ScenarioConfig) -> dict[str, Any]:
    return {
        "duration_h": config.duration_h,
        "tick_s": config.tick_s,
        "weather_timeline": [
            {"start_s": s.start_s, "end_s": s.end_s, "condition": s.condition.value}
            for s in config.weather_timeline
        ],
        "field_size_m": list(config.field_size_m),
        "node_placements": [list(p) for p in config.node_placements],
        "crop_name": config.crop_name,
        "soil": {
            "pump_rate_per_min": config.soil.pump_rate_per_min,
            "et_rates_per_min": {
                c.value: r for c, r in config.soil.et_rates_per_min.items()
            },
        },
        "initial_moisture_pct": config.initial_moisture_pct,
        "initial_charge_fraction": config.initial_charge_fraction,
        "load_current_ma": config.load_current_ma,
        "battery_capacity_mah": config.battery_capacity_mah,
        "automation_enabled": config.automation_enabled,
        "capture_time_s": config.capture_time_s,
        "seed": config.seed,
    }


def config_from_dict(raw: Mapping[str, Any]) -> ScenarioConfig:
    """Build a config from parsed JSON, rejecting unknown keys loudly."""
    known = {f.name for f in fields(ScenarioConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ValueError(f"unknown scenario keys: {sorted(unknown)}")
    kwargs: dict[str, Any] = dict(raw)
    if "weather_timeline" in kwargs:
        kwargs["weather_timeline"] = tuple(
            WeatherSegment(
                start_s=float(seg["start_s"]),
                end_s=float(seg["end_s"]),
                condition=WeatherCondition(seg["condition"]),
            )
            for seg in kwargs["weather_timeline"]
        )
    if "field_size_m" in kwargs:
        w, h = kwargs["field_size_m"]
        kwargs["field_size_m"] = (float(w), float(h))
    if "node_placements" in kwargs:
        kwargs["node_placements"] = tuple(
            (float(x), float(y)) for x, y in kwargs["node_placements"]
        )
    if "soil" in kwargs:
        soil_raw = dict(kwargs["soil"])
        unknown_soil = set(soil_raw) - {"pump_rate_per_min", "et_rates_per_min"}
        if unknown_soil:
            raise ValueError(f"unknown soil keys: {sorted(unknown_soil)}")
        soil_kwargs: dict[str, Any] = {}
        if "pump_rate_per_min" in soil_raw:
            soil_kwargs["pump_rate_per_min"] = float(soil_raw["pump_rate_per_min"])
        if "et_rates_per_min" in soil_raw:
            base = dict(ET_RATE_PER_MIN)
            for name, rate in soil_raw["et_rates_per_min"].items():
                base[WeatherCondition(name)] = float(rate)
            soil_kwargs["et_rates_per_min"] = base
        kwargs["soil"] = SoilParams(**soil_kwargs)
    return ScenarioConfig(**kwargs)


def load_config(path: str | Path) -> ScenarioConfig:
    """Read and validate a scenario JSON file."""
    raw = json.loads(Path(path).read_text())
    if not isinstance(raw, dict):
        raise ValueError("scenario file must hold a JSON object")
    return config_from_dict(raw)


def save_config(config: ScenarioConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(config_to_dict(config), indent=2) + "\n")
