"""HTTP JSON API over the cloud store.

Routes:
    POST /channels/{id}/update   body {write_key, field1..field8}
    GET  /channels/{id}/feed?results=N
    GET  /crops
    POST /crops/select           body {crop_name}
    GET  /crops/threshold
    POST /nodes/{id}/images      binary PPM/PGM body
    GET  /nodes/{id}/images/latest
    POST /nodes/{id}/predictions body {label, confidence, image_id, lesion_box?}
    GET  /nodes/{id}/predictions/latest
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, Query, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .store import ChannelEntry, CloudStore, CropProfile, PredictionRecord, WriteStatus


class ChannelUpdate(BaseModel):
    write_key: str
    field1: Optional[float] = None
    field2: Optional[float] = None
    field3: Optional[float] = None
    field4: Optional[float] = None
    field5: Optional[float] = None
    field6: Optional[float] = None
    field7: Optional[float] = None
    field8: Optional[float] = None

    def field_values(self) -> dict[str, float]:
        values = {
            name: value
            for name, value in self.model_dump(exclude={"write_key"}).items()
            if value is not None
        }
        return values


class CropSelect(BaseModel):
    crop_name: str


class PredictionBody(BaseModel):
    label: str
    confidence: float
    image_id: int
    lesion_box: Optional[tuple[int, int, int, int]] = None


def _crop_json(profile: CropProfile) -> dict:
    return {
        "crop_name": profile.crop_name,
        "threshold_sm": profile.threshold_sm,
        "release_sm": profile.release_sm,
    }


def _entry_json(entry: ChannelEntry) -> dict:
    return {
        "entry_id": entry.entry_id,
        "created_at": entry.created_at,
        "timestamp": entry.timestamp,
        **entry.fields,
    }


def _prediction_json(record: PredictionRecord) -> dict:
    return {
        "prediction_id": record.prediction_id,
        "node_id": record.node_id,
        "created_at": record.created_at,
        "timestamp": record.timestamp,
        "label": record.label,
        "confidence": record.confidence,
        "image_id": record.image_id,
        "lesion_box": list(record.lesion_box) if record.lesion_box else None,
    }


def create_app(store: CloudStore) -> FastAPI:
    app = FastAPI(title="scrop telemetry cloud", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
        expose_headers=["x-image-id"],
    )
    app.state.store = store

    @app.post("/channels/{channel_id}/update")
    def channel_update(channel_id: str, body: ChannelUpdate) -> dict:
        try:
            result = store.channel_write(channel_id, body.write_key, body.field_values())
        except KeyError:
            raise HTTPException(status_code=404, detail="unknown channel")
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        if result.status is WriteStatus.UNAUTHORIZED:
            raise HTTPException(status_code=401, detail="unauthorized")
        if result.status is WriteStatus.RATE_LIMITED:
            raise HTTPException(status_code=429, detail="rate_limited")
        return {"entry_id": result.entry_id}

    @app.get("/channels/{channel_id}/feed")
    def channel_feed(channel_id: str, results: int = Query(default=100, ge=1)) -> dict:
        try:
            entries = store.channel_feed(channel_id, results)
        except KeyError:
            raise HTTPException(status_code=404, detail="unknown channel")
        return {"channel": channel_id, "records": [_entry_json(e) for e in entries]}

    @app.get("/crops")
    def crops() -> dict:
        return {
            "crops": [_crop_json(p) for p in store.list_crops()],
            "selected": store.selected_crop().crop_name,
        }

    @app.post("/crops/select")
    def crops_select(body: CropSelect) -> dict:
        try:
            profile = store.select_crop(body.crop_name)
        except KeyError:
            raise HTTPException(status_code=404, detail="unknown crop")
        return _crop_json(profile)

    @app.get("/crops/threshold")
    def crops_threshold() -> dict:
        return _crop_json(store.selected_crop())

    @app.post("/nodes/{node_id}/images")
    async def post_image(node_id: str, request: Request) -> dict:
        data = await request.body()
        try:
            record = store.put_image(node_id, data)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"image_id": record.image_id, "size": record.size}

    @app.get("/nodes/{node_id}/images/latest")
    def latest_image(node_id: str) -> Response:
        try:
            data, record = store.get_latest_image(node_id)
        except KeyError:
            raise HTTPException(status_code=404, detail="no image for node")
        media = "image/x-portable-pixmap" if data.startswith(b"P6") else "image/x-portable-graymap"
        return Response(
            content=data, media_type=media, headers={"x-image-id": str(record.image_id)}
        )

    @app.post("/nodes/{node_id}/predictions")
    def post_prediction(node_id: str, body: PredictionBody) -> dict:
        try:
            record = store.put_prediction(
                node_id, body.label, body.confidence, body.image_id, body.lesion_box
            )
        except KeyError:
            raise HTTPException(status_code=404, detail="unknown image_id")
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return _prediction_json(record)

    @app.get("/nodes/{node_id}/predictions/latest")
    def latest_prediction(node_id: str) -> dict:
        record = store.get_latest_prediction(node_id)
        if record is None:
            raise HTTPException(status_code=404, detail="no prediction for node")
        return _prediction_json(record)

    return app


def create_live_app(data_dir: Optional[Path] = None) -> FastAPI:
    """App wired for interactive use: wall clock, immediate visibility."""
    store = CloudStore(visibility_delay_s=0.0, data_dir=data_dir)
    return create_app(store)
