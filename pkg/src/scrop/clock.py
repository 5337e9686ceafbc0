"""Simulated wall clock shared by the controller, cloud store, and scenarios."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta

# Fixed base date so every simulated timestamp is reproducible byte for byte.
SIM_EPOCH = datetime(2021, 6, 1, 0, 0, 0)


@dataclass(frozen=True)
class SimClock:
    """Maps simulation seconds onto ISO-8601 timestamps from a fixed epoch."""

    base: datetime = SIM_EPOCH

    def iso(self, time_s: float) -> str:
        return (self.base + timedelta(seconds=time_s)).isoformat()
