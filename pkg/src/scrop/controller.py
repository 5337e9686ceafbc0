"""Threshold-driven irrigation controller.

One controller instance manages one pump relay. The decision rule is a
hysteresis band: the pump latches on when soil moisture falls to the crop
threshold and releases only once moisture has climbed past the release
level, so the relay never chatters around a single setpoint.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Optional

from .clock import SimClock

#: Pause between control iterations, matching the node firmware's delay.
LOOP_DELAY_MS = 9000

_DEFAULT_CLOCK = SimClock()


@dataclass(frozen=True)
class ControllerConfig:
    threshold_sm: float = 30.0
    release_sm: Optional[float] = None
    loop_delay_ms: int = LOOP_DELAY_MS

    def __post_init__(self) -> None:
        if self.release_sm is None:
            object.__setattr__(self, "release_sm", self.threshold_sm + 5.0)
        if not 0.0 <= self.threshold_sm <= 100.0:
            raise ValueError("threshold_sm must lie in [0, 100]")
        if not self.threshold_sm <= self.release_sm <= 100.0:
            raise ValueError("release_sm must lie in [threshold_sm, 100]")
        if self.loop_delay_ms <= 0:
            raise ValueError("loop_delay_ms must be positive")


class PumpAction(str, Enum):
    ON = "PumpOn"
    OFF = "PumpOff"


@dataclass(frozen=True)
class IrrigationEvent:
    timestamp: str
    action: PumpAction
    sm_at_event: float
    time_s: float


@dataclass(frozen=True)
class ControllerState:
    relay_on: bool = False
    last_event: Optional[IrrigationEvent] = None


def control_step(
    current_sm: float,
    cfg: ControllerConfig,
    state: ControllerState,
    now_s: float = 0.0,
    timestamp: Optional[str] = None,
) -> tuple[ControllerState, Optional[IrrigationEvent]]:
    """One hysteresis decision. Returns the new state and a transition event, if any.

    The pump turns on at moisture <= threshold and off strictly above the
    release level; between the two it holds its previous state.
    """
    if timestamp is None:
        timestamp = _DEFAULT_CLOCK.iso(now_s)
    if not state.relay_on and current_sm <= cfg.threshold_sm:
        event = IrrigationEvent(timestamp, PumpAction.ON, current_sm, now_s)
        return ControllerState(relay_on=True, last_event=event), event
    if state.relay_on and current_sm > cfg.release_sm:
        event = IrrigationEvent(timestamp, PumpAction.OFF, current_sm, now_s)
        return ControllerState(relay_on=False, last_event=event), event
    return state, None


@dataclass(frozen=True)
class NodeSample:
    """One telemetry record produced per control iteration."""

    time_s: float
    timestamp: str
    moisture: float
    temperature_c: float
    humidity_pct: float
    relay_on: bool
    thresholds_stale: bool


@dataclass(frozen=True)
class FaultRecord:
    time_s: float
    timestamp: str
    message: str


@dataclass(frozen=True)
class IterationResult:
    time_s: float
    sample: NodeSample
    event: Optional[IrrigationEvent]


class NodeLoop:
    """Sensor-read / threshold-fetch / actuate / publish cycle for one node.

    All I/O is injected as callables so the same loop body runs against the
    in-process simulator, the HTTP client, or test doubles. Publish failures
    are counted but never interrupt control: irrigation must keep working
    when the uplink is down. A failing sensor skips the whole iteration and
    leaves a fault record instead of acting on garbage.
    """

    def __init__(
        self,
        config: ControllerConfig,
        *,
        read_moisture: Callable[[], float],
        fetch_thresholds: Callable[[], tuple[float, float]],
        read_climate: Optional[Callable[[], tuple[float, float]]] = None,
        publish_sample: Optional[Callable[[NodeSample], None]] = None,
        publish_event: Optional[Callable[[IrrigationEvent], None]] = None,
        rail_on: Optional[Callable[[], bool]] = None,
        clock: SimClock = _DEFAULT_CLOCK,
    ) -> None:
        self.config = config
        self._read_moisture = read_moisture
        self._fetch_thresholds = fetch_thresholds
        self._read_climate = read_climate
        self._publish_sample = publish_sample
        self._publish_event = publish_event
        self._rail_on = rail_on
        self._clock = clock
        self._state = ControllerState()
        self._cached_thresholds: Optional[tuple[float, float]] = None
        self._next_due: Optional[float] = None
        self.faults: list[FaultRecord] = []
        self.iterations = 0
        self.publish_failures = 0

    @property
    def state(self) -> ControllerState:
        return self._state

    @property
    def relay_on(self) -> bool:
        return self._state.relay_on

    def _effective_config(self) -> tuple[ControllerConfig, bool]:
        """Fetch crop thresholds, falling back to the last good pair on failure."""
        try:
            low, high = self._fetch_thresholds()
            cfg = replace(self.config, threshold_sm=float(low), release_sm=float(high))
        except Exception:
            cfg = None
        if cfg is not None:
            self._cached_thresholds = (cfg.threshold_sm, cfg.release_sm)
            return cfg, False
        if self._cached_thresholds is not None:
            low, high = self._cached_thresholds
            return replace(self.config, threshold_sm=low, release_sm=high), True
        return self.config, True

    def iterate(self, now_s: float) -> Optional[IterationResult]:
        """Run one control iteration if the rail is up and the delay has elapsed.

        With the rail down nothing runs and nothing is recorded; the relay
        latch and threshold cache survive untouched, so the loop resumes
        exactly where it left off when power returns.
        """
        if self._rail_on is not None and not self._rail_on():
            return None
        if self._next_due is not None and now_s < self._next_due:
            return None
        self._next_due = now_s + self.config.loop_delay_ms / 1000.0
        self.iterations += 1
        timestamp = self._clock.iso(now_s)

        cfg, stale = self._effective_config()
        try:
            moisture = float(self._read_moisture())
            if self._read_climate is not None:
                temperature, humidity = self._read_climate()
            else:
                temperature, humidity = 0.0, 0.0
        except Exception as exc:
            self.faults.append(FaultRecord(now_s, timestamp, f"sensor failure: {exc}"))
            return None

        self._state, event = control_step(moisture, cfg, self._state, now_s, timestamp)
        sample = NodeSample(
            time_s=now_s,
            timestamp=timestamp,
            moisture=moisture,
            temperature_c=temperature,
            humidity_pct=humidity,
            relay_on=self._state.relay_on,
            thresholds_stale=stale,
        )

        if self._publish_sample is not None:
            try:
                self._publish_sample(sample)
            except Exception:
                self.publish_failures += 1
        if event is not None and self._publish_event is not None:
            try:
                self._publish_event(event)
            except Exception:
                self.publish_failures += 1
        return IterationResult(time_s=now_s, sample=sample, event=event)


def run_loop(
    loop: NodeLoop,
    duration_s: float,
    *,
    start_s: float = 0.0,
    tick_s: float = 1.0,
) -> list[IterationResult]:
    """Drive a node loop over a window of simulated time, one tick at a time."""
    if tick_s <= 0:
        raise ValueError("tick_s must be positive")
    results: list[IterationResult] = []
    ticks = int(round(duration_s / tick_s))
    for i in range(ticks):
        result = loop.iterate(start_s + i * tick_s)
        if result is not None:
            results.append(result)
    return results


def write_events_csv(events: list[IrrigationEvent], path) -> None:
    """Event log as CSV with columns timestamp, action, sm."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["timestamp", "action", "sm"])
        for event in events:
            writer.writerow([event.timestamp, event.action.value, repr(event.sm_at_event)])
