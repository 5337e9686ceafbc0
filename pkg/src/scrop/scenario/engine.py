"""Deterministic end-to-end field simulation.

One engine instance owns one simulated day (or any other window): a weather
timeline drives the solar panel and evapotranspiration, the battery and
3.3 V rail gate the node, the irrigation loop reads calibrated moisture and
pushes telemetry through an in-process cloud store, and a daily camera
capture feeds the leaf classifier. Everything runs off one seed and one
simulated clock, so a (config, seed) pair pins every trace byte.
"""

from __future__ import annotations

from dataclasses import replace as dc_replace
from typing import Optional

import numpy as np

from ..clock import SimClock
from ..cloud import CloudStore, InProcessCloudClient
from ..cloud.client import EVENTS_CHANNEL, TELEMETRY_CHANNEL
from ..controller import (
    ControllerConfig,
    IrrigationEvent,
    NodeLoop,
    NodeSample,
    PumpAction,
)
from ..classifier import LeafClassifier, predict_once
from ..power import BatteryState, make_state, step_power
from ..sensors import (
    SoilColumnState,
    ambient_conditions,
    analog_to_moisture,
    capture_leaf,
    encode_ppm,
    moisture_to_analog,
    read_dht,
    step_soil,
)
from .config import DAY_S, ScenarioConfig
from .report import ChannelUsage, ComparisonReport, PredictionOutcome, SimReport

NODE_ID = "node1"

# Fixed-schedule baseline: two 45-minute irrigations per day, dawn and dusk.
BASELINE_SLOTS_S = ((18000.0, 20700.0), (61200.0, 63900.0))


class _SimNow:
    """Mutable simulated epoch the cloud store reads its time from."""

    def __init__(self) -> None:
        self.value = 0.0

    def __call__(self) -> float:
        return self.value


def _baseline_schedule_on(time_s: float) -> bool:
    t = time_s % DAY_S
    return any(start <= t < end for start, end in BASELINE_SLOTS_S)


class _Engine:
    def __init__(self, config: ScenarioConfig) -> None:
        self.config = config
        self.clock = SimClock()
        self.now = _SimNow()
        self.store = CloudStore(clock=self.now, timestamp_fn=self.clock.iso)
        self.client = InProcessCloudClient(self.store)
        try:
            profile = self.store.select_crop(config.crop_name)
        except KeyError as exc:
            raise ValueError(str(exc)) from exc
        self.threshold_sm = profile.threshold_sm
        self.release_sm = profile.release_sm

        ambient = ambient_conditions(config.condition_at(0.0), 0.0)
        self.soil = SoilColumnState(
            true_moisture_pct=config.initial_moisture_pct,
            temperature_c=ambient.temperature_c,
            humidity_pct=ambient.humidity_pct,
        )
        battery = BatteryState(
            capacity_mah=config.battery_capacity_mah,
            charge_fraction=config.initial_charge_fraction,
        )
        self.power = make_state(battery, config.condition_at(0.0))

        self.model = LeafClassifier(seed=config.seed)
        self.rng = np.random.default_rng(config.seed)
        self.events: list[IrrigationEvent] = []
        self.predictions: list[PredictionOutcome] = []

        self.loop = NodeLoop(
            ControllerConfig(),
            read_moisture=self._measured,
            fetch_thresholds=self.client.fetch_thresholds,
            read_climate=self._climate,
            publish_sample=self.client.publish_sample,
            publish_event=self.client.publish_event,
            rail_on=self._rail,
            clock=self.clock,
        )
        # baseline arm bookkeeping (used when automation is disabled)
        self._baseline_relay = False
        self._baseline_logged_on = False
        self._baseline_next_due: Optional[float] = None

    # -- node I/O callables -------------------------------------------

    def _measured(self) -> float:
        return analog_to_moisture(moisture_to_analog(self.soil.true_moisture_pct))

    def _climate(self) -> tuple[float, float]:
        return read_dht(self.soil)

    def _rail(self) -> bool:
        return self.power.rail_on

    # -- baseline arm ---------------------------------------------------

    def _baseline_iterate(self, t: float, loop_delay_s: float) -> None:
        """Fixed-schedule control: same cadence and publishes, no hysteresis."""
        if not self.power.rail_on:
            return
        if self._baseline_next_due is not None and t < self._baseline_next_due:
            return
        self._baseline_next_due = t + loop_delay_s
        timestamp = self.clock.iso(t)
        measured = self._measured()
        desired = _baseline_schedule_on(t)
        if desired != self._baseline_logged_on:
            action = PumpAction.ON if desired else PumpAction.OFF
            event = IrrigationEvent(timestamp, action, measured, t)
            self.events.append(event)
            self.client.publish_event(event)
            self._baseline_logged_on = desired
        self._baseline_relay = desired
        temperature, humidity = self._climate()
        self.client.publish_sample(
            NodeSample(
                time_s=t,
                timestamp=timestamp,
                moisture=measured,
                temperature_c=temperature,
                humidity_pct=humidity,
                relay_on=self._baseline_relay,
                thresholds_stale=False,
            )
        )

    # -- camera + prediction job ----------------------------------------

    def _capture_and_predict(self, t: float) -> None:
        class_id = int(self.rng.integers(0, 4))
        frame_seed = int(self.rng.integers(0, 2**31))
        frame = capture_leaf(frame_seed, class_id)
        self.client.put_image(NODE_ID, encode_ppm(frame))
        outcome = predict_once(self.client, self.model, NODE_ID)
        self.predictions.append(
            PredictionOutcome(
                time_s=t,
                status=outcome.status,
                label=outcome.result.label if outcome.result else None,
                confidence=outcome.result.confidence if outcome.result else None,
            )
        )

    # -- main loop --------------------------------------------------------

    def run(self) -> SimReport:
        config = self.config
        ticks = config.ticks
        tick_s = config.tick_s
        loop_delay_s = self.loop.config.loop_delay_ms / 1000.0
        automation = config.automation_enabled
        soil_params = config.soil
        load_ma = config.load_current_ma

        # resolve the sky condition for every tick up front
        conditions = []
        segments = iter(config.weather_timeline)
        segment = next(segments, None)
        for i in range(ticks):
            t = i * tick_s
            while segment is not None and t >= segment.end_s:
                segment = next(segments, None)
            if segment is None:
                raise ValueError(f"no weather segment covers t={t}")
            conditions.append(segment.condition)

        trace_time: list[float] = []
        trace_condition: list[str] = []
        trace_moisture: list[float] = []
        trace_smps: list[float] = []
        trace_panel: list[float] = []
        trace_source: list[str] = []
        trace_charge: list[float] = []
        trace_relay: list[bool] = []
        trace_rail: list[bool] = []

        next_capture = config.capture_time_s
        rail_ticks = 0

        for i in range(ticks):
            t = i * tick_s
            self.now.value = t
            condition = conditions[i]

            ambient = ambient_conditions(condition, t)
            self.soil = dc_replace(
                self.soil,
                temperature_c=ambient.temperature_c,
                humidity_pct=ambient.humidity_pct,
            )

            self.power = step_power(self.power, condition, load_ma, tick_s)
            rail = self.power.rail_on
            if rail:
                rail_ticks += 1

            if automation:
                result = self.loop.iterate(t)
                if result is not None and result.event is not None:
                    self.events.append(result.event)
                latch = self.loop.relay_on
            else:
                self._baseline_iterate(t, loop_delay_s)
                latch = self._baseline_relay
            relay = latch and rail

            if t >= next_capture and rail:
                self._capture_and_predict(t)
                next_capture += DAY_S

            before = self.soil.true_moisture_pct
            self.soil = step_soil(
                self.soil,
                condition,
                relay,
                tick_s,
                pump_rate_per_min=soil_params.pump_rate_per_min,
                et_rates=soil_params.et_rates_per_min,
            )
            after = self.soil.true_moisture_pct
            # conservation audit: the trace may move only by the pump or ET term
            dt_min = tick_s / 60.0
            if relay:
                expected = before + soil_params.pump_rate_per_min * dt_min
            else:
                expected = before - soil_params.et_rates_per_min[condition] * dt_min
            expected = min(100.0, max(0.0, expected))
            if abs(after - expected) > 1e-12:
                raise RuntimeError(
                    f"conservation audit failed at tick {i}: {before} -> {after}, "
                    f"expected {expected}"
                )

            trace_time.append(t)
            trace_condition.append(condition.value)
            trace_moisture.append(after)
            trace_smps.append(analog_to_moisture(moisture_to_analog(after)))
            trace_panel.append(self.power.panel_voltage)
            trace_source.append(self.power.source.value)
            trace_charge.append(self.power.battery.charge_fraction)
            trace_relay.append(relay)
            trace_rail.append(rail)

        # let the visibility window lapse, then read back what the cloud accepted
        self.now.value = ticks * tick_s + self.store.visibility_delay_s
        usage = []
        for channel in (TELEMETRY_CHANNEL, EVENTS_CHANNEL):
            stats = self.store.channel_stats(channel)
            if stats.accepted:
                entries = self.store.channel_feed(channel, results=stats.accepted)
                times = tuple(e.created_at for e in entries)
            else:
                times = ()
            usage.append(
                ChannelUsage(
                    channel=channel,
                    accepted=stats.accepted,
                    rate_limited=stats.rate_limited,
                    unauthorized=stats.unauthorized,
                    accepted_times=times,
                )
            )

        # an empty window never witnessed an outage
        uptime = rail_ticks / ticks if ticks else 1.0

        return SimReport(
            config=config,
            time_s=tuple(trace_time),
            condition=tuple(trace_condition),
            true_moisture=tuple(trace_moisture),
            measured_smps=tuple(trace_smps),
            panel_v=tuple(trace_panel),
            source=tuple(trace_source),
            charge_fraction=tuple(trace_charge),
            relay_on=tuple(trace_relay),
            rail_on=tuple(trace_rail),
            events=tuple(self.events),
            faults=tuple(self.loop.faults),
            channel_usage=tuple(usage),
            visibility_delay_s=self.store.visibility_delay_s,
            predictions=tuple(self.predictions),
            threshold_sm=self.threshold_sm,
            release_sm=self.release_sm,
            uptime_fraction=uptime,
        )


def run_scenario(config: ScenarioConfig) -> SimReport:
    """Simulate one node over the configured window and report every trace."""
    return _Engine(config).run()


def compare_automation(config: ScenarioConfig) -> ComparisonReport:
    """Run the hysteresis controller and the fixed-schedule baseline side by side.

    Both arms share the seed, weather, soil model, and power model; only the
    relay decision differs, which is exactly the comparison the field trial
    makes.
    """
    automated = run_scenario(config)
    baseline = run_scenario(dc_replace(config, automation_enabled=False))
    return ComparisonReport(automated=automated, baseline=baseline)
