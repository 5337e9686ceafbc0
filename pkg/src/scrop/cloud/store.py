"""Channel-based telemetry store with write keys, rate limiting, a crop
registry, and per-node image/prediction stores.

Writes are authenticated by per-channel keys and throttled to one accepted
record per 15 simulated seconds. Accepted records become readable only after
a visibility delay (15 s in simulation, 0 in live service mode). Persistence
is an append-only JSON-lines file per resource under a data directory;
restarting with the same directory replays the logs.
"""

from __future__ import annotations

import base64
import json
import time
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Mapping, NamedTuple, Optional, Sequence

MIN_WRITE_INTERVAL_S = 15.0
VISIBILITY_DELAY_S = 15.0

#: The eight numeric slots a channel record may carry.
FIELD_NAMES = tuple(f"field{i}" for i in range(1, 9))

#: Channel catalogue with write keys. Keys are deployment configuration; these
#: defaults keep the simulator and examples self-contained.
DEFAULT_CHANNEL_KEYS: Mapping[str, str] = {
    "telemetry": "WK-TELEMETRY-0001",
    "events": "WK-EVENTS-0002",
}


@dataclass(frozen=True)
class CropProfile:
    crop_name: str
    threshold_sm: float
    release_sm: float

    def __post_init__(self) -> None:
        if not self.crop_name:
            raise ValueError("crop_name must be non-empty")
        if self.threshold_sm < 0.0:
            raise ValueError("threshold_sm must be non-negative")
        if self.release_sm < self.threshold_sm:
            raise ValueError("release_sm must be at least threshold_sm")


#: Thresholds are configuration, not agronomy: chosen so the default crop's
#: refill run takes about 45 minutes at the pump rate.
DEFAULT_CROPS: tuple[CropProfile, ...] = (
    CropProfile("default", 30.0, 52.5),
    CropProfile("chili", 25.0, 47.5),
    CropProfile("potato", 35.0, 57.5),
    CropProfile("tomato", 40.0, 62.5),
)


class WriteStatus(str, Enum):
    ACCEPTED = "accepted"
    RATE_LIMITED = "rate_limited"
    UNAUTHORIZED = "unauthorized"


class WriteResult(NamedTuple):
    status: WriteStatus
    entry_id: Optional[int]


@dataclass(frozen=True)
class ChannelEntry:
    entry_id: int
    created_at: float
    timestamp: str
    fields: Mapping[str, float]


class ChannelStats(NamedTuple):
    accepted: int
    rate_limited: int
    unauthorized: int


@dataclass(frozen=True)
class ImageRecord:
    image_id: int
    node_id: str
    created_at: float
    timestamp: str
    size: int


@dataclass(frozen=True)
class PredictionRecord:
    prediction_id: int
    node_id: str
    created_at: float
    timestamp: str
    label: str
    confidence: float
    image_id: int
    lesion_box: Optional[tuple[int, int, int, int]] = None  # (x0, y0, x1, y1) frame px


class _Channel:
    def __init__(self, write_key: str) -> None:
        self.write_key = write_key
        self.entries: list[ChannelEntry] = []
        self.last_accepted_at: Optional[float] = None
        self.rate_limited = 0
        self.unauthorized = 0


def _require_numeric_fields(fields: Mapping[str, Any]) -> dict[str, float]:
    if not fields:
        raise ValueError("a write must carry at least one field")
    clean: dict[str, float] = {}
    for name, value in fields.items():
        if name not in FIELD_NAMES:
            raise ValueError(f"unknown field slot {name!r}; use field1..field8")
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValueError(f"{name} must be numeric, got {type(value).__name__}")
        clean[name] = float(value)
    return clean


class CloudStore:
    """In-process telemetry cloud; the HTTP service is a thin layer over this."""

    def __init__(
        self,
        *,
        clock: Optional[Callable[[], float]] = None,
        timestamp_fn: Optional[Callable[[float], str]] = None,
        visibility_delay_s: float = VISIBILITY_DELAY_S,
        min_write_interval_s: float = MIN_WRITE_INTERVAL_S,
        channel_keys: Mapping[str, str] = DEFAULT_CHANNEL_KEYS,
        crops: tuple[CropProfile, ...] = DEFAULT_CROPS,
        data_dir: Optional[Path] = None,
    ) -> None:
        if not channel_keys:
            raise ValueError("at least one channel must be configured")
        self._clock = clock if clock is not None else time.time
        self._timestamp_fn = timestamp_fn or (
            lambda t: datetime.fromtimestamp(t).isoformat(timespec="seconds")
        )
        self.visibility_delay_s = visibility_delay_s
        self.min_write_interval_s = min_write_interval_s
        self._channels = {name: _Channel(key) for name, key in channel_keys.items()}
        self._crops = {profile.crop_name: profile for profile in crops}
        if "default" not in self._crops:
            raise ValueError("crop catalogue must include a 'default' profile")
        self._selected_crop = "default"
        self._next_entry_id = 1
        self._next_image_id = 1
        self._next_prediction_id = 1
        self._images: dict[int, tuple[bytes, ImageRecord]] = {}
        self._latest_image: dict[str, int] = {}
        self._predictions: dict[str, list[PredictionRecord]] = {}
        self._data_dir = Path(data_dir) if data_dir is not None else None
        if self._data_dir is not None:
            self._data_dir.mkdir(parents=True, exist_ok=True)
            self._replay()

    def now(self) -> float:
        return float(self._clock())

    # -- persistence ---------------------------------------------------

    def _append(self, log_name: str, record: Mapping[str, Any]) -> None:
        if self._data_dir is None:
            return
        path = self._data_dir / f"{log_name}.jsonl"
        with open(path, "a") as fh:
            fh.write(json.dumps(record, sort_keys=True) + "\n")

    def _read_log(self, log_name: str) -> list[dict[str, Any]]:
        if self._data_dir is None:
            return []
        path = self._data_dir / f"{log_name}.jsonl"
        if not path.exists():
            return []
        records = []
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if line:
                    records.append(json.loads(line))
        return records

    def _replay(self) -> None:
        for name, channel in self._channels.items():
            for rec in self._read_log(f"channel_{name}"):
                entry = ChannelEntry(
                    entry_id=int(rec["entry_id"]),
                    created_at=float(rec["created_at"]),
                    timestamp=str(rec["timestamp"]),
                    fields={k: float(v) for k, v in rec["fields"].items()},
                )
                channel.entries.append(entry)
                channel.last_accepted_at = entry.created_at
                self._next_entry_id = max(self._next_entry_id, entry.entry_id + 1)
        for rec in self._read_log("registry"):
            if rec.get("selected_crop") in self._crops:
                self._selected_crop = rec["selected_crop"]
        for rec in self._read_log("images"):
            record = ImageRecord(
                image_id=int(rec["image_id"]),
                node_id=str(rec["node_id"]),
                created_at=float(rec["created_at"]),
                timestamp=str(rec["timestamp"]),
                size=int(rec["size"]),
            )
            data = base64.b64decode(rec["data_b64"])
            self._images[record.image_id] = (data, record)
            self._latest_image[record.node_id] = record.image_id
            self._next_image_id = max(self._next_image_id, record.image_id + 1)
        for rec in self._read_log("predictions"):
            record = PredictionRecord(
                prediction_id=int(rec["prediction_id"]),
                node_id=str(rec["node_id"]),
                created_at=float(rec["created_at"]),
                timestamp=str(rec["timestamp"]),
                label=str(rec["label"]),
                confidence=float(rec["confidence"]),
                image_id=int(rec["image_id"]),
                lesion_box=(
                    tuple(int(v) for v in rec["lesion_box"])
                    if rec.get("lesion_box")
                    else None
                ),
            )
            self._predictions.setdefault(record.node_id, []).append(record)
            self._next_prediction_id = max(self._next_prediction_id, record.prediction_id + 1)

    # -- channels ------------------------------------------------------

    def channel_names(self) -> list[str]:
        return sorted(self._channels)

    def _channel(self, channel_id: str) -> _Channel:
        if channel_id not in self._channels:
            raise KeyError(f"unknown channel {channel_id!r}")
        return self._channels[channel_id]

    def channel_write(
        self, channel_id: str, write_key: str, fields: Mapping[str, Any]
    ) -> WriteResult:
        """Append one record. Rejected writes leave the channel untouched."""
        channel = self._channel(channel_id)
        if write_key != channel.write_key:
            channel.unauthorized += 1
            return WriteResult(WriteStatus.UNAUTHORIZED, None)
        clean = _require_numeric_fields(fields)
        now = self.now()
        last = channel.last_accepted_at
        if last is not None and now - last < self.min_write_interval_s:
            channel.rate_limited += 1
            return WriteResult(WriteStatus.RATE_LIMITED, None)
        entry = ChannelEntry(
            entry_id=self._next_entry_id,
            created_at=now,
            timestamp=self._timestamp_fn(now),
            fields=clean,
        )
        self._next_entry_id += 1
        channel.entries.append(entry)
        channel.last_accepted_at = now
        self._append(
            f"channel_{channel_id}",
            {
                "entry_id": entry.entry_id,
                "created_at": entry.created_at,
                "timestamp": entry.timestamp,
                "fields": clean,
            },
        )
        return WriteResult(WriteStatus.ACCEPTED, entry.entry_id)

    def channel_feed(self, channel_id: str, results: int = 100) -> list[ChannelEntry]:
        """Last `results` visible records, newest last."""
        if results < 1:
            raise ValueError("results must be at least 1")
        channel = self._channel(channel_id)
        horizon = self.now() - self.visibility_delay_s
        visible = [e for e in channel.entries if e.created_at <= horizon]
        return visible[-results:]

    def channel_stats(self, channel_id: str) -> ChannelStats:
        channel = self._channel(channel_id)
        return ChannelStats(
            accepted=len(channel.entries),
            rate_limited=channel.rate_limited,
            unauthorized=channel.unauthorized,
        )

    # -- crop registry ---------------------------------------------------

    def list_crops(self) -> list[CropProfile]:
        return sorted(self._crops.values(), key=lambda p: p.crop_name)

    def selected_crop(self) -> CropProfile:
        return self._crops[self._selected_crop]

    def select_crop(self, crop_name: str) -> CropProfile:
        if crop_name not in self._crops:
            raise KeyError(f"unknown crop {crop_name!r}")
        self._selected_crop = crop_name
        self._append("registry", {"selected_crop": crop_name, "at": self.now()})
        return self._crops[crop_name]

    def current_thresholds(self) -> tuple[float, float]:
        profile = self.selected_crop()
        return profile.threshold_sm, profile.release_sm

    # -- images ----------------------------------------------------------

    def put_image(self, node_id: str, data: bytes) -> ImageRecord:
        """Store one camera frame verbatim; the newest frame wins `latest`."""
        if not node_id:
            raise ValueError("node_id must be non-empty")
        if not (data.startswith(b"P6") or data.startswith(b"P5")):
            raise ValueError("image body must be binary PPM (P6) or PGM (P5)")
        now = self.now()
        record = ImageRecord(
            image_id=self._next_image_id,
            node_id=node_id,
            created_at=now,
            timestamp=self._timestamp_fn(now),
            size=len(data),
        )
        self._next_image_id += 1
        self._images[record.image_id] = (data, record)
        self._latest_image[node_id] = record.image_id
        self._append(
            "images",
            {
                "image_id": record.image_id,
                "node_id": record.node_id,
                "created_at": record.created_at,
                "timestamp": record.timestamp,
                "size": record.size,
                "data_b64": base64.b64encode(data).decode("ascii"),
            },
        )
        return record

    def get_image(self, image_id: int) -> tuple[bytes, ImageRecord]:
        if image_id not in self._images:
            raise KeyError(f"unknown image {image_id}")
        return self._images[image_id]

    def get_latest_image(self, node_id: str) -> tuple[bytes, ImageRecord]:
        if node_id not in self._latest_image:
            raise KeyError(f"no image stored for node {node_id!r}")
        return self._images[self._latest_image[node_id]]

    # -- predictions -------------------------------------------------------

    def put_prediction(
        self,
        node_id: str,
        label: str,
        confidence: float,
        image_id: int,
        lesion_box: Optional[Sequence[int]] = None,
    ) -> PredictionRecord:
        if not label:
            raise ValueError("label must be non-empty")
        if not 0.0 <= float(confidence) <= 1.0:
            raise ValueError("confidence must lie in [0, 1]")
        if image_id not in self._images:
            raise KeyError(f"prediction references unknown image {image_id}")
        box: Optional[tuple[int, int, int, int]] = None
        if lesion_box is not None:
            if len(lesion_box) != 4:
                raise ValueError("lesion_box must hold exactly 4 coordinates")
            x0, y0, x1, y1 = (int(v) for v in lesion_box)
            box = (x0, y0, x1, y1)
        now = self.now()
        record = PredictionRecord(
            prediction_id=self._next_prediction_id,
            node_id=node_id,
            created_at=now,
            timestamp=self._timestamp_fn(now),
            label=str(label),
            confidence=float(confidence),
            image_id=int(image_id),
            lesion_box=box,
        )
        self._next_prediction_id += 1
        self._predictions.setdefault(node_id, []).append(record)
        self._append(
            "predictions",
            {
                "prediction_id": record.prediction_id,
                "node_id": record.node_id,
                "created_at": record.created_at,
                "timestamp": record.timestamp,
                "label": record.label,
                "confidence": record.confidence,
                "image_id": record.image_id,
                "lesion_box": list(record.lesion_box) if record.lesion_box else None,
            },
        )
        return record

    def get_latest_prediction(self, node_id: str) -> Optional[PredictionRecord]:
        records = self._predictions.get(node_id)
        return records[-1] if records else None

    def list_predictions(self, node_id: str) -> list[PredictionRecord]:
        return list(self._predictions.get(node_id, []))
