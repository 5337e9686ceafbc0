"""Channel-based telemetry store with an HTTP JSON API.

The store mimics a hosted IoT backend: write-key auth, per-channel write
throttling, a short ingestion delay before entries become readable, a crop
registry the controller polls for thresholds, plus per-node image and
prediction stores.
"""

from .client import (
    EVENTS_CHANNEL,
    TELEMETRY_CHANNEL,
    HttpCloudClient,
    InProcessCloudClient,
    event_fields,
    sample_fields,
)
from .service import create_app, create_live_app
from .store import (
    DEFAULT_CHANNEL_KEYS,
    DEFAULT_CROPS,
    FIELD_NAMES,
    MIN_WRITE_INTERVAL_S,
    VISIBILITY_DELAY_S,
    ChannelEntry,
    ChannelStats,
    CloudStore,
    CropProfile,
    ImageRecord,
    PredictionRecord,
    WriteResult,
    WriteStatus,
)

__all__ = [
    "DEFAULT_CHANNEL_KEYS",
    "DEFAULT_CROPS",
    "EVENTS_CHANNEL",
    "FIELD_NAMES",
    "MIN_WRITE_INTERVAL_S",
    "TELEMETRY_CHANNEL",
    "VISIBILITY_DELAY_S",
    "ChannelEntry",
    "ChannelStats",
    "CloudStore",
    "CropProfile",
    "HttpCloudClient",
    "ImageRecord",
    "InProcessCloudClient",
    "PredictionRecord",
    "WriteResult",
    "WriteStatus",
    "create_app",
    "create_live_app",
    "event_fields",
    "sample_fields",
]
