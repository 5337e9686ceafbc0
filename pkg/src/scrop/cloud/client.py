"""Clients the node firmware and simulator use to talk to the cloud.

Both clients expose the same small surface; one calls the store in process,
the other speaks the HTTP API. Field mapping is a fixed convention:

telemetry  field1=soil moisture, field2=temperature C, field3=humidity %,
           field4=relay state (1/0), field5=stale-threshold flag (1/0)
events     field1=action (1=PumpOn, 0=PumpOff), field2=sm at event,
           field3=event time in simulation seconds
"""

from __future__ import annotations

from typing import Mapping, Optional, Sequence

import httpx

from ..controller import IrrigationEvent, NodeSample, PumpAction
from .store import (
    DEFAULT_CHANNEL_KEYS,
    CloudStore,
    CropProfile,
    ImageRecord,
    PredictionRecord,
    WriteResult,
)

TELEMETRY_CHANNEL = "telemetry"
EVENTS_CHANNEL = "events"


def sample_fields(sample: NodeSample) -> dict[str, float]:
    return {
        "field1": sample.moisture,
        "field2": sample.temperature_c,
        "field3": sample.humidity_pct,
        "field4": 1.0 if sample.relay_on else 0.0,
        "field5": 1.0 if sample.thresholds_stale else 0.0,
    }


def event_fields(event: IrrigationEvent) -> dict[str, float]:
    return {
        "field1": 1.0 if event.action is PumpAction.ON else 0.0,
        "field2": event.sm_at_event,
        "field3": event.time_s,
    }


class InProcessCloudClient:
    """Direct store calls; what the simulator wires into each node loop."""

    def __init__(
        self,
        store: CloudStore,
        *,
        write_keys: Mapping[str, str] = DEFAULT_CHANNEL_KEYS,
    ) -> None:
        self._store = store
        self._keys = dict(write_keys)

    def _key(self, channel: str) -> str:
        return self._keys.get(channel, "")

    def fetch_thresholds(self) -> tuple[float, float]:
        return self._store.current_thresholds()

    def select_crop(self, crop_name: str) -> CropProfile:
        return self._store.select_crop(crop_name)

    def list_crops(self) -> list[CropProfile]:
        return self._store.list_crops()

    def publish_sample(self, sample: NodeSample) -> WriteResult:
        return self._store.channel_write(
            TELEMETRY_CHANNEL, self._key(TELEMETRY_CHANNEL), sample_fields(sample)
        )

    def publish_event(self, event: IrrigationEvent) -> WriteResult:
        return self._store.channel_write(
            EVENTS_CHANNEL, self._key(EVENTS_CHANNEL), event_fields(event)
        )

    def put_image(self, node_id: str, data: bytes) -> ImageRecord:
        return self._store.put_image(node_id, data)

    def get_latest_image(self, node_id: str) -> tuple[bytes, int]:
        data, record = self._store.get_latest_image(node_id)
        return data, record.image_id

    def put_prediction(
        self,
        node_id: str,
        label: str,
        confidence: float,
        image_id: int,
        lesion_box: Optional[Sequence[int]] = None,
    ) -> PredictionRecord:
        return self._store.put_prediction(node_id, label, confidence, image_id, lesion_box)

    def get_latest_prediction(self, node_id: str) -> Optional[PredictionRecord]:
        return self._store.get_latest_prediction(node_id)


class HttpCloudClient:
    """Same surface over the HTTP JSON API."""

    def __init__(
        self,
        base_url: str,
        *,
        write_keys: Mapping[str, str] = DEFAULT_CHANNEL_KEYS,
        timeout_s: float = 10.0,
        transport: Optional[httpx.BaseTransport] = None,
    ) -> None:
        self._client = httpx.Client(
            base_url=base_url.rstrip("/"), timeout=timeout_s, transport=transport
        )
        self._keys = dict(write_keys)

    def close(self) -> None:
        self._client.close()

    def __enter__(self) -> "HttpCloudClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _write(self, channel: str, fields: Mapping[str, float]) -> dict:
        body = {"write_key": self._keys.get(channel, ""), **fields}
        resp = self._client.post(f"/channels/{channel}/update", json=body)
        resp.raise_for_status()
        return resp.json()

    def fetch_thresholds(self) -> tuple[float, float]:
        resp = self._client.get("/crops/threshold")
        resp.raise_for_status()
        data = resp.json()
        return float(data["threshold_sm"]), float(data["release_sm"])

    def select_crop(self, crop_name: str) -> dict:
        resp = self._client.post("/crops/select", json={"crop_name": crop_name})
        resp.raise_for_status()
        return resp.json()

    def list_crops(self) -> list[dict]:
        resp = self._client.get("/crops")
        resp.raise_for_status()
        return resp.json()["crops"]

    def publish_sample(self, sample: NodeSample) -> dict:
        return self._write(TELEMETRY_CHANNEL, sample_fields(sample))

    def publish_event(self, event: IrrigationEvent) -> dict:
        return self._write(EVENTS_CHANNEL, event_fields(event))

    def feed(self, channel: str, results: int = 100) -> list[dict]:
        resp = self._client.get(f"/channels/{channel}/feed", params={"results": results})
        resp.raise_for_status()
        return resp.json()["records"]

    def put_image(self, node_id: str, data: bytes) -> dict:
        resp = self._client.post(
            f"/nodes/{node_id}/images",
            content=data,
            headers={"content-type": "application/octet-stream"},
        )
        resp.raise_for_status()
        return resp.json()

    def get_latest_image(self, node_id: str) -> tuple[bytes, int]:
        resp = self._client.get(f"/nodes/{node_id}/images/latest")
        resp.raise_for_status()
        return resp.content, int(resp.headers.get("x-image-id", "0"))

    def put_prediction(
        self,
        node_id: str,
        label: str,
        confidence: float,
        image_id: int,
        lesion_box: Optional[Sequence[int]] = None,
    ) -> dict:
        resp = self._client.post(
            f"/nodes/{node_id}/predictions",
            json={
                "label": label,
                "confidence": confidence,
                "image_id": image_id,
                "lesion_box": list(lesion_box) if lesion_box is not None else None,
            },
        )
        resp.raise_for_status()
        return resp.json()

    def get_latest_prediction(self, node_id: str) -> Optional[dict]:
        resp = self._client.get(f"/nodes/{node_id}/predictions/latest")
        if resp.status_code == 404:
            return None
        resp.raise_for_status()
        return resp.json()
