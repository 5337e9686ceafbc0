"""Capture-to-prediction path: preprocessing, inference, lesion localization,
and the periodic job that pulls camera frames from the cloud and stores
prediction records against them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Optional

import numpy as np

from ..sensors import decode_pgm, decode_ppm
from .model import LeafClassifier

TILE = 32


def preprocess(frame: np.ndarray) -> np.ndarray:
    """Camera frame to model input: grayscale, block-mean downscale, [0, 1].

    The frame's height and width must both be multiples of the 32-tile grid
    (VGA is: 480 = 32*15, 640 = 32*20).
    """
    frame = np.asarray(frame)
    if frame.ndim == 3:
        if frame.shape[2] != 3:
            raise ValueError("color frames must be (H, W, 3)")
        gray = frame.astype(float).mean(axis=2)
    elif frame.ndim == 2:
        gray = frame.astype(float)
    else:
        raise ValueError("expected an (H, W) or (H, W, 3) frame")
    h, w = gray.shape
    if h % TILE or w % TILE:
        raise ValueError(f"frame dimensions must be multiples of {TILE}")
    bh, bw = h // TILE, w // TILE
    tiles = gray.reshape(TILE, bh, TILE, bw).mean(axis=(1, 3)) / 255.0
    return tiles[:, :, None]


@dataclass(frozen=True)
class PredictionResult:
    label: str
    confidence: float
    probabilities: dict[str, float]
    lesion_box: Optional[tuple[int, int, int, int]]  # (x0, y0, x1, y1) frame pixels


def lesion_box(
    activation: np.ndarray, frame_shape: tuple[int, int]
) -> Optional[tuple[int, int, int, int]]:
    """Bounding box of the strongest feature-map cells, in frame pixels.

    Cells within the top tenth of the activation range count as hot; the
    box is their hull scaled back to the source frame. Returns None for a
    flat map (nothing stands out).
    """
    energy = activation.mean(axis=2)
    lo, hi = float(energy.min()), float(energy.max())
    if hi - lo <= 1e-12:
        return None
    hot = energy >= lo + 0.9 * (hi - lo)
    rows, cols = np.nonzero(hot)
    frame_h, frame_w = frame_shape
    cell_h = frame_h / energy.shape[0]
    cell_w = frame_w / energy.shape[1]
    return (
        int(cols.min() * cell_w),
        int(rows.min() * cell_h),
        int((cols.max() + 1) * cell_w),
        int((rows.max() + 1) * cell_h),
    )


def classify_frame(model: LeafClassifier, frame: np.ndarray) -> PredictionResult:
    """Classify a camera frame; diseased verdicts also localize the lesions."""
    x = preprocess(frame)
    probs, cache = model.forward(x)
    idx = int(np.argmax(probs))
    label = model.labels[idx]
    box = None
    if label != "healthy":
        last = len(model.conv_channels) - 1
        box = lesion_box(cache[f"conv{last}_r"], frame.shape[:2])
    return PredictionResult(
        label=label,
        confidence=float(probs[idx]),
        probabilities={model.labels[i]: float(p) for i, p in enumerate(probs)},
        lesion_box=box,
    )


@dataclass(frozen=True)
class PipelineCycle:
    """Outcome of one periodic prediction pass."""

    cycle: int
    status: str  # "stored" | "no_image" | "cloud_error"
    result: Optional[PredictionResult] = None
    stored: Any = None
    message: str = ""


def _decode_image(data: bytes) -> np.ndarray:
    if data.startswith(b"P6"):
        return decode_ppm(data)
    if data.startswith(b"P5"):
        return decode_pgm(data)
    raise ValueError("unsupported image payload; expected binary PPM or PGM")


def _is_not_found(exc: Exception) -> bool:
    if isinstance(exc, KeyError):
        return True
    response = getattr(exc, "response", None)
    return response is not None and getattr(response, "status_code", None) == 404


def predict_once(
    cloud_client: Any,
    model: LeafClassifier,
    node_id: str = "node1",
    *,
    cycle: int = 0,
    log: Optional[Callable[[str], None]] = None,
) -> PipelineCycle:
    """Fetch the node's newest frame, classify it, store the prediction.

    A node with no image yet is skipped with a log line; any cloud failure
    is reported as a cycle-level error so the caller can retry next period.
    """

    def note(message: str) -> None:
        if log is not None:
            log(message)

    try:
        data, image_id = cloud_client.get_latest_image(node_id)
    except Exception as exc:
        if _is_not_found(exc):
            note(f"cycle {cycle}: no image for {node_id}, skipping")
            return PipelineCycle(cycle, "no_image", message=str(exc))
        note(f"cycle {cycle}: image fetch failed ({exc}), will retry")
        return PipelineCycle(cycle, "cloud_error", message=str(exc))

    result = classify_frame(model, _decode_image(data))
    try:
        stored = cloud_client.put_prediction(
            node_id, result.label, result.confidence, image_id, result.lesion_box
        )
    except Exception as exc:
        note(f"cycle {cycle}: prediction store failed ({exc}), will retry")
        return PipelineCycle(cycle, "cloud_error", result=result, message=str(exc))
    note(f"cycle {cycle}: {result.label} ({result.confidence:.3f}) for image {image_id}")
    return PipelineCycle(cycle, "stored", result=result, stored=stored)


def predict_pipeline(
    cloud_client: Any,
    model: LeafClassifier,
    *,
    node_id: str = "node1",
    period_s: float = 86400.0,
    cycles: int = 1,
    sleep: Optional[Callable[[float], None]] = None,
    log: Optional[Callable[[str], None]] = None,
) -> list[PipelineCycle]:
    """Run the prediction job every `period_s` for a number of cycles.

    Each pass waits out one period (via the injected sleep, which advances
    simulated time in tests and scenarios), then classifies the node's
    latest frame. Failed cycles don't abort the job; the next period simply
    tries again.
    """
    if period_s <= 0:
        raise ValueError("period_s must be positive")
    if cycles < 0:
        raise ValueError("cycles must be non-negative")
    outcomes = []
    for cycle in range(cycles):
        if sleep is not None:
            sleep(period_s)
        outcomes.append(predict_once(cloud_client, model, node_id, cycle=cycle, log=log))
    return outcomes
