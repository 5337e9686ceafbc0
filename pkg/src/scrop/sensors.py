"""Sensor models: soil-moisture probe calibration, soil column dynamics,
air temperature/humidity stub, and a synthetic leaf camera.

The camera produces deterministic VGA frames so that image-pipeline tests
and dataset generation never depend on real optics.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, NamedTuple

import numpy as np

from .power import WeatherCondition

ADC_MAX = 1023

#: Evapotranspiration drain per sky condition, calibration units per minute.
ET_RATE_PER_MIN = {
    WeatherCondition.SHADY_DARK: 0.02,
    WeatherCondition.OVERCAST: 0.04,
    WeatherCondition.MODERATELY_SUNNY: 0.08,
    WeatherCondition.SUNNY: 0.12,
}

#: Moisture gain while the pump relay is closed, calibration units per minute.
PUMP_RATE_PER_MIN = 0.5

IMAGE_WIDTH = 640
IMAGE_HEIGHT = 480

#: Class id 0 is a healthy leaf; the rest are synthetic disease signatures.
CLASS_NAMES = ("healthy", "leaf_blight", "leaf_rust", "leaf_spot")
DISEASE_CLASSES = {1: "leaf_blight", 2: "leaf_rust", 3: "leaf_spot"}


def gravimetric_moisture(wet_weight_g: float, dry_weight_g: float) -> float:
    """Mass ratio of water to solids, (WW - DW) / DW."""
    if dry_weight_g <= 0:
        raise ValueError("dry weight must be positive")
    if wet_weight_g < dry_weight_g:
        raise ValueError("wet weight cannot be below dry weight")
    return (wet_weight_g - dry_weight_g) / dry_weight_g


def gravimetric_moisture_percent(wet_weight_g: float, dry_weight_g: float) -> float:
    return 100.0 * gravimetric_moisture(wet_weight_g, dry_weight_g)


@dataclass(frozen=True)
class MoistureCalibration:
    """Affine fit from raw ADC counts to moisture percentage, scaled by k^2.

    The k constant comes from the probe's exponential response fit; it is a
    plain literal, not math.e, so recalibration stays a data change.
    """

    slope: float = 0.008985
    intercept: float = 0.207762
    k: float = 2.718282

    @property
    def k_squared(self) -> float:
        return self.k * self.k

    def analog_to_moisture(self, mv: int) -> float:
        """Moisture percentage for one raw ADC reading (0..1023)."""
        if not 0 <= mv <= ADC_MAX:
            raise ValueError(f"ADC count must lie in 0..{ADC_MAX}, got {mv}")
        return self.k_squared * (self.slope * mv + self.intercept)

    def moisture_to_analog(self, smps: float) -> int:
        """Nearest ADC count producing the given moisture percentage, clamped."""
        mv = round((smps / self.k_squared - self.intercept) / self.slope)
        return int(min(ADC_MAX, max(0, mv)))

    @property
    def smps_per_count(self) -> float:
        """Moisture-percentage width of one ADC step."""
        return self.k_squared * self.slope


DEFAULT_CALIBRATION = MoistureCalibration()


def analog_to_moisture(mv: int, calibration: MoistureCalibration = DEFAULT_CALIBRATION) -> float:
    return calibration.analog_to_moisture(mv)


def moisture_to_analog(smps: float, calibration: MoistureCalibration = DEFAULT_CALIBRATION) -> int:
    return calibration.moisture_to_analog(smps)


@dataclass(frozen=True)
class SoilColumnState:
    """Ground truth for the monitored soil column and the air above it."""

    true_moisture_pct: float
    temperature_c: float = 25.0
    humidity_pct: float = 60.0
    depth_cm: float = 30.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.true_moisture_pct <= 100.0:
            raise ValueError("soil moisture must lie in [0, 100]")
        if not 0.0 <= self.humidity_pct <= 100.0:
            raise ValueError("humidity must lie in [0, 100]")
        if self.depth_cm <= 0.0:
            raise ValueError("probe depth must be positive")


def step_soil(
    state: SoilColumnState,
    condition: WeatherCondition,
    pump_on: bool,
    dt_s: float,
    *,
    pump_rate_per_min: float = PUMP_RATE_PER_MIN,
    et_rates: Mapping[WeatherCondition, float] = ET_RATE_PER_MIN,
) -> SoilColumnState:
    """Advance soil moisture by dt seconds.

    Irrigation dominates: while the relay is closed the column gains at the
    pump rate and evapotranspiration is ignored; otherwise it drains at the
    condition's rate. The result clamps to the calibration range. Air fields
    pass through untouched; the environment model owns them.
    """
    dt_min = max(0.0, dt_s) / 60.0
    if pump_on:
        moisture = state.true_moisture_pct + pump_rate_per_min * dt_min
    else:
        moisture = state.true_moisture_pct - et_rates[condition] * dt_min
    return replace(state, true_moisture_pct=min(100.0, max(0.0, moisture)))


class DhtReading(NamedTuple):
    temperature_c: float
    humidity_pct: float


_BASE_TEMP_C = {
    WeatherCondition.SUNNY: 33.0,
    WeatherCondition.MODERATELY_SUNNY: 28.0,
    WeatherCondition.OVERCAST: 23.0,
    WeatherCondition.SHADY_DARK: 18.0,
}

_BASE_HUMIDITY_PCT = {
    WeatherCondition.SUNNY: 38.0,
    WeatherCondition.MODERATELY_SUNNY: 48.0,
    WeatherCondition.OVERCAST: 66.0,
    WeatherCondition.SHADY_DARK: 78.0,
}

# DHT11-class tolerance band.
DHT_TEMP_TOLERANCE_C = 2.0
DHT_HUMIDITY_TOLERANCE_PCT = 5.0


def ambient_conditions(condition: WeatherCondition, time_s: float = 0.0) -> DhtReading:
    """Ground-truth air state: condition baseline plus a diurnal swing."""
    phase = 2.0 * np.pi * ((time_s % 86400.0) / 86400.0) - np.pi / 2.0
    swing = float(np.sin(phase))
    temperature = _BASE_TEMP_C[condition] + 3.0 * swing
    humidity = _BASE_HUMIDITY_PCT[condition] - 6.0 * swing
    return DhtReading(temperature_c=temperature, humidity_pct=float(np.clip(humidity, 5.0, 100.0)))


def read_dht(soil: SoilColumnState, noise_seed: int | None = None) -> DhtReading:
    """Sample the air sensor: ground truth plus bounded instrument noise.

    ``noise_seed=None`` reads the truth back exactly; an integer seed adds a
    deterministic draw inside the tolerance band. Humidity clamps to [0, 100].
    """
    temperature = soil.temperature_c
    humidity = soil.humidity_pct
    if noise_seed is not None:
        rng = np.random.default_rng(noise_seed)
        temperature += float(rng.uniform(-DHT_TEMP_TOLERANCE_C, DHT_TEMP_TOLERANCE_C))
        humidity += float(rng.uniform(-DHT_HUMIDITY_TOLERANCE_PCT, DHT_HUMIDITY_TOLERANCE_PCT))
    return DhtReading(
        temperature_c=temperature,
        humidity_pct=float(min(100.0, max(0.0, humidity))),
    )


def _base_leaf(seed: int) -> np.ndarray:
    """Healthy leaf texture: coarse mottling over a green base, plus fine grain."""
    rng = np.random.default_rng(seed)
    coarse = rng.integers(-10, 11, size=(IMAGE_HEIGHT // 16, IMAGE_WIDTH // 16, 3))
    coarse = np.kron(coarse, np.ones((16, 16, 1), dtype=np.int64))
    fine = rng.integers(-4, 5, size=(IMAGE_HEIGHT, IMAGE_WIDTH, 3))
    base = np.array([52, 128, 44], dtype=np.int64)[None, None, :] + coarse + fine
    return np.clip(base, 0, 255).astype(np.uint8)


_LESION_STYLE = {
    # class id: (min count, max count, min radius, max radius, RGB center)
    # blight: few large dark-brown patches; rust: dense bright pustules;
    # spot: mid-sized near-black spots. Kept strongly separated in both
    # gray level and coverage so a downscaled tile still carries the class.
    1: (5, 8, 50, 90, (52, 34, 18)),
    2: (60, 90, 6, 12, (240, 160, 40)),
    3: (14, 20, 16, 28, (10, 8, 6)),
}


def lesion_mask(seed: int, class_id: int) -> np.ndarray:
    """Boolean mask of pixels a disease overlay is allowed to touch.

    Drawn from an RNG stream keyed on (seed, class_id) and independent of the
    base-texture stream, so the healthy frame for the same seed is untouched
    outside this mask.
    """
    if class_id not in _LESION_STYLE:
        raise ValueError(f"unknown disease class {class_id}")
    rng = np.random.default_rng([seed, class_id])
    lo_n, hi_n, lo_r, hi_r, _ = _LESION_STYLE[class_id]
    count = int(rng.integers(lo_n, hi_n + 1))
    mask = np.zeros((IMAGE_HEIGHT, IMAGE_WIDTH), dtype=bool)
    yy, xx = np.ogrid[:IMAGE_HEIGHT, :IMAGE_WIDTH]
    for _ in range(count):
        r = int(rng.integers(lo_r, hi_r + 1))
        cx = int(rng.integers(r, IMAGE_WIDTH - r))
        cy = int(rng.integers(r, IMAGE_HEIGHT - r))
        mask |= (yy - cy) ** 2 + (xx - cx) ** 2 <= r * r
    return mask


def capture_leaf(seed: int, class_id: int = 0) -> np.ndarray:
    """Synthetic VGA leaf frame as a (480, 640, 3) uint8 RGB array.

    class_id 0 is healthy; 1..3 overlay the matching lesion pattern. The same
    (seed, class_id) always yields the identical frame.
    """
    if class_id == 0:
        return _base_leaf(seed)
    image = _base_leaf(seed)
    mask = lesion_mask(seed, class_id)
    rng = np.random.default_rng([seed, class_id, 1])
    color = np.array(_LESION_STYLE[class_id][4], dtype=np.int64)
    jitter = rng.integers(-14, 15, size=(int(mask.sum()), 3))
    image[mask] = np.clip(color[None, :] + jitter, 0, 255).astype(np.uint8)
    return image


def encode_ppm(image: np.ndarray) -> bytes:
    """Binary PPM (P6, maxval 255) for an (H, W, 3) uint8 array."""
    if image.ndim != 3 or image.shape[2] != 3 or image.dtype != np.uint8:
        raise ValueError("expected an (H, W, 3) uint8 array")
    h, w = image.shape[:2]
    return f"P6\n{w} {h}\n255\n".encode("ascii") + image.tobytes()


def encode_pgm(image: np.ndarray) -> bytes:
    """Binary PGM (P5, maxval 255) for an (H, W) uint8 array."""
    if image.ndim != 2 or image.dtype != np.uint8:
        raise ValueError("expected an (H, W) uint8 array")
    h, w = image.shape
    return f"P5\n{w} {h}\n255\n".encode("ascii") + image.tobytes()


def _parse_netpbm_header(data: bytes, magic: bytes) -> tuple[int, int, int]:
    """Return (width, height, offset of pixel data), tolerating # comments."""
    if not data.startswith(magic):
        raise ValueError(f"not a {magic.decode()} file")
    fields: list[int] = []
    i = len(magic)
    while len(fields) < 3:
        if i >= len(data):
            raise ValueError("truncated header")
        c = data[i : i + 1]
        if c == b"#":
            while i < len(data) and data[i : i + 1] != b"\n":
                i += 1
        elif c.isspace():
            i += 1
        else:
            j = i
            while j < len(data) and not data[j : j + 1].isspace():
                j += 1
            fields.append(int(data[i:j]))
            i = j
    if fields[2] != 255:
        raise ValueError("only maxval 255 is supported")
    return fields[0], fields[1], i + 1


def decode_ppm(data: bytes) -> np.ndarray:
    w, h, offset = _parse_netpbm_header(data, b"P6")
    pixels = np.frombuffer(data, dtype=np.uint8, count=w * h * 3, offset=offset)
    if pixels.size != w * h * 3:
        raise ValueError("truncated pixel data")
    return pixels.reshape(h, w, 3).copy()


def decode_pgm(data: bytes) -> np.ndarray:
    w, h, offset = _parse_netpbm_header(data, b"P5")
    pixels = np.frombuffer(data, dtype=np.uint8, count=w * h, offset=offset)
    if pixels.size != w * h:
        raise ValueError("truncated pixel data")
    return pixels.reshape(h, w).copy()
