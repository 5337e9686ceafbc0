"""Power model for one solar node: panel, diode charge gate, backup battery, 3.3 V rail.

All transitions are pure functions over immutable states, so traces for
distinct nodes can be evaluated concurrently without shared state.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping


class WeatherCondition(Enum):
    SUNNY = "sunny"
    MODERATELY_SUNNY = "moderately_sunny"
    OVERCAST = "overcast"
    SHADY_DARK = "shady_dark"


#: Measured panel output per sky condition for the 12 V / 15 W panel, in volts.
CONDITION_VOLTAGE: Mapping[WeatherCondition, float] = {
    WeatherCondition.SUNNY: 16.3,
    WeatherCondition.MODERATELY_SUNNY: 14.4,
    WeatherCondition.OVERCAST: 8.33,
    WeatherCondition.SHADY_DARK: 0.89,
}

#: Regulated rail that feeds the microcontroller and sensors.
RAIL_VOLTS = 3.3
#: Minimum panel voltage at which the diode gate lets the battery charge.
CHARGE_GATE_VOLTS = 12.9
#: Typical 12 V 7 Ah sealed backup battery.
DEFAULT_CAPACITY_MAH = 7000.0


class PowerSource(Enum):
    PANEL = "panel"
    BATTERY = "battery"
    NONE = "none"


@dataclass(frozen=True)
class SolarPanelModel:
    rated_voltage: float = 12.0
    rated_power: float = 15.0
    condition_voltage: Mapping[WeatherCondition, float] = field(
        default_factory=lambda: dict(CONDITION_VOLTAGE)
    )

    def __post_init__(self) -> None:
        missing = [c for c in WeatherCondition if c not in self.condition_voltage]
        if missing:
            raise ValueError(f"condition_voltage must be total, missing {missing}")
        if any(v < 0 for v in self.condition_voltage.values()):
            raise ValueError("condition voltages must be non-negative")


DEFAULT_PANEL = SolarPanelModel()


@dataclass(frozen=True)
class BatteryState:
    nominal_voltage: float = 12.0
    capacity_mah: float = DEFAULT_CAPACITY_MAH
    charge_fraction: float = 1.0

    def __post_init__(self) -> None:
        if self.capacity_mah <= 0:
            raise ValueError("battery capacity must be positive")
        if not 0.0 <= self.charge_fraction <= 1.0:
            raise ValueError("charge_fraction must lie in [0, 1]")


@dataclass(frozen=True)
class PowerState:
    panel_voltage: float
    battery: BatteryState
    rail_on: bool
    rail_voltage: float
    source: PowerSource

    def __post_init__(self) -> None:
        if self.rail_on and self.rail_voltage != RAIL_VOLTS:
            raise ValueError(f"powered rail must sit at {RAIL_VOLTS} V")
        if self.source is PowerSource.NONE and self.rail_on:
            raise ValueError("rail cannot be on without a source")


def panel_voltage(model: SolarPanelModel, condition: WeatherCondition) -> float:
    """Panel output voltage for a sky condition (total map, no interpolation)."""
    return model.condition_voltage[condition]


def regulate(input_voltage: float) -> float | None:
    """Regulated 3.3 V rail, or None when the input sits below the rail target."""
    if input_voltage < 0:
        raise ValueError("input voltage must be non-negative")
    return RAIL_VOLTS if input_voltage >= RAIL_VOLTS else None


def charging_current_ma(model: SolarPanelModel, load_current_ma: float) -> float:
    """Current available to the battery once the gate is open, floored at 0.

    Power-balance approximation: the panel rating caps total current at
    rated_power / nominal panel voltage; the node load is served first.
    """
    total_ma = model.rated_power / model.rated_voltage * 1000.0
    return max(0.0, total_ma - max(0.0, load_current_ma))


def make_state(
    battery: BatteryState,
    condition: WeatherCondition,
    model: SolarPanelModel = DEFAULT_PANEL,
) -> PowerState:
    """Instantaneous state for a battery and sky condition, before any step."""
    pv = panel_voltage(model, condition)
    if pv >= RAIL_VOLTS:
        source = PowerSource.PANEL
    elif battery.charge_fraction > 0.0:
        source = PowerSource.BATTERY
    else:
        source = PowerSource.NONE
    rail_on = source is not PowerSource.NONE
    return PowerState(
        panel_voltage=pv,
        battery=battery,
        rail_on=rail_on,
        rail_voltage=RAIL_VOLTS if rail_on else 0.0,
        source=source,
    )


def step_power(
    state: PowerState,
    condition: WeatherCondition,
    load_current_ma: float,
    dt_s: float,
    model: SolarPanelModel = DEFAULT_PANEL,
) -> PowerState:
    """Advance the node's power state by dt seconds under one sky condition.

    The diode gate opens only at panel voltages >= 12.9 V, so the battery
    charges exclusively above the gate and never back-feeds the panel.
    Below 3.3 V the battery carries the rail until it empties, after which
    the node goes dark. Degenerate inputs clamp instead of raising.
    """
    dt_s = max(0.0, dt_s)
    load_current_ma = max(0.0, load_current_ma)
    battery = state.battery
    pv = panel_voltage(model, condition)

    if pv >= CHARGE_GATE_VOLTS:
        source = PowerSource.PANEL
        added = charging_current_ma(model, load_current_ma) * dt_s / 3600.0
        charge = min(1.0, battery.charge_fraction + added / battery.capacity_mah)
        battery = replace(battery, charge_fraction=charge)
    elif pv >= RAIL_VOLTS:
        source = PowerSource.PANEL
    elif battery.charge_fraction > 0.0:
        source = PowerSource.BATTERY
        drawn = load_current_ma * dt_s / 3600.0
        charge = max(0.0, battery.charge_fraction - drawn / battery.capacity_mah)
        battery = replace(battery, charge_fraction=charge)
    else:
        source = PowerSource.NONE

    rail_on = source is not PowerSource.NONE
    return PowerState(
        panel_voltage=pv,
        battery=battery,
        rail_on=rail_on,
        rail_voltage=RAIL_VOLTS if rail_on else 0.0,
        source=source,
    )


def write_power_csv(
    rows: Iterable[tuple[int, WeatherCondition, PowerState]],
    path: str | Path,
) -> None:
    """Export a power trace as CSV: tick, condition, panel_v, source, charge_fraction, rail_on."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tick", "condition", "panel_v", "source", "charge_fraction", "rail_on"])
        for tick, condition, st in rows:
            writer.writerow(
                [
                    tick,
                    condition.value,
                    st.panel_voltage,
                    st.source.value,
                    st.battery.charge_fraction,
                    int(st.rail_on),
                ]
            )
