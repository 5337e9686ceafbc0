"""Simulation report structures and trace/summary exporters.

Exports are deliberately boring: repr() floats in CSV cells and sorted,
indented JSON, so re-exporting the same report is byte-identical and diffs
stay readable.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from ..controller import FaultRecord, IrrigationEvent, write_events_csv
from .config import ScenarioConfig

TRACE_COLUMNS = (
    "time_s",
    "condition",
    "true_moisture",
    "measured_smps",
    "panel_v",
    "source",
    "charge_fraction",
    "relay_on",
    "rail_on",
)


@dataclass(frozen=True)
class ChannelUsage:
    """Write outcomes for one cloud channel over a run."""

    channel: str
    accepted: int
    rate_limited: int
    unauthorized: int
    accepted_times: tuple[float, ...]


@dataclass(frozen=True)
class PredictionOutcome:
    time_s: float
    status: str
    label: Optional[str] = None
    confidence: Optional[float] = None


@dataclass(frozen=True)
class SimReport:
    config: ScenarioConfig
    # parallel per-tick traces; row i is the state after tick i completed
    time_s: tuple[float, ...]
    condition: tuple[str, ...]
    true_moisture: tuple[float, ...]
    measured_smps: tuple[float, ...]
    panel_v: tuple[float, ...]
    source: tuple[str, ...]
    charge_fraction: tuple[float, ...]
    relay_on: tuple[bool, ...]
    rail_on: tuple[bool, ...]
    events: tuple[IrrigationEvent, ...]
    faults: tuple[FaultRecord, ...]
    channel_usage: tuple[ChannelUsage, ...]
    visibility_delay_s: float
    predictions: tuple[PredictionOutcome, ...]
    threshold_sm: float
    release_sm: float
    uptime_fraction: float

    @property
    def ticks(self) -> int:
        return len(self.time_s)

    @property
    def peak_moisture(self) -> float:
        return max(self.true_moisture) if self.true_moisture else 0.0

    def time_in_band_fraction(self, margin: float = 2.0) -> float:
        """Share of ticks with moisture inside [threshold - margin, release + margin]."""
        if not self.true_moisture:
            return 0.0
        lo = self.threshold_sm - margin
        hi = self.release_sm + margin
        inside = sum(1 for m in self.true_moisture if lo <= m <= hi)
        return inside / len(self.true_moisture)


@dataclass(frozen=True)
class ComparisonReport:
    automated: SimReport
    baseline: SimReport


def summarize(report: SimReport) -> dict:
    """Flat summary of a run; every field restates a report statistic."""
    return {
        "ticks": report.ticks,
        "duration_h": report.config.duration_h,
        "tick_s": report.config.tick_s,
        "seed": report.config.seed,
        "crop_name": report.config.crop_name,
        "automation_enabled": report.config.automation_enabled,
        "threshold_sm": report.threshold_sm,
        "release_sm": report.release_sm,
        "uptime_fraction": report.uptime_fraction,
        "event_count": len(report.events),
        "fault_count": len(report.faults),
        "prediction_count": sum(1 for p in report.predictions if p.status == "stored"),
        "final_moisture": report.true_moisture[-1] if report.true_moisture else None,
        "final_charge_fraction": (
            report.charge_fraction[-1] if report.charge_fraction else None
        ),
        "peak_moisture": report.peak_moisture,
        "time_in_band_fraction": report.time_in_band_fraction(),
        "visibility_delay_s": report.visibility_delay_s,
        "channels": {
            usage.channel: {
                "accepted": usage.accepted,
                "rate_limited": usage.rate_limited,
                "unauthorized": usage.unauthorized,
            }
            for usage in report.channel_usage
        },
    }


def write_trace_csv(report: SimReport, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_COLUMNS)
        rows = zip(
            report.time_s,
            report.condition,
            report.true_moisture,
            report.measured_smps,
            report.panel_v,
            report.source,
            report.charge_fraction,
            report.relay_on,
            report.rail_on,
        )
        for t, cond, moist, smps, pv, source, charge, relay, rail in rows:
            writer.writerow(
                [
                    repr(float(t)),
                    cond,
                    repr(float(moist)),
                    repr(float(smps)),
                    repr(float(pv)),
                    source,
                    repr(float(charge)),
                    int(relay),
                    int(rail),
                ]
            )


def export_report(
    report: SimReport, out_dir: str | Path, format: str = "csv"
) -> list[Path]:
    """Write trace.csv, events.csv, and summary.json under out_dir."""
    if format != "csv":
        raise ValueError(f"unsupported export format {format!r}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    trace_path = out / "trace.csv"
    events_path = out / "events.csv"
    summary_path = out / "summary.json"
    write_trace_csv(report, trace_path)
    write_events_csv(list(report.events), events_path)
    summary_path.write_text(
        json.dumps(summarize(report), indent=2, sort_keys=True) + "\n"
    )
    return [trace_path, events_path, summary_path]


def export_comparison(
    comparison: ComparisonReport, out_dir: str | Path, format: str = "csv"
) -> list[Path]:
    """Write per-arm traces/events plus one paired summary.json."""
    if format != "csv":
        raise ValueError(f"unsupported export format {format!r}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for arm, rep in (("automated", comparison.automated), ("baseline", comparison.baseline)):
        trace_path = out / f"{arm}_trace.csv"
        events_path = out / f"{arm}_events.csv"
        write_trace_csv(rep, trace_path)
        write_events_csv(list(rep.events), events_path)
        paths += [trace_path, events_path]
    summary_path = out / "summary.json"
    summary_path.write_text(
        json.dumps(
            {
                "automated": summarize(comparison.automated),
                "baseline": summarize(comparison.baseline),
            },
            indent=2,
            sort_keys=True,
        )
        + "\n"
    )
    paths.append(summary_path)
    return paths
