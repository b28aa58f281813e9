# File: src/gaze_expertise/models/checkpoint.py

import json
import logging
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError

from ..core.errors import ConfigurationError, ParseError
from ..features.normalize import FeatureStats
from .multistream import Model, ModelConfig

logger = logging.getLogger(__name__)

CHECKPOINT_FORMAT = "gaze-expertise-checkpoint"
CHECKPOINT_VERSION = 1
_META_KEY = "__meta__"


class Checkpoint(BaseModel):
    """A trained model plus what is needed to feed it: normalizer and input geometry."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    model: Model
    stats: FeatureStats | None = None
    window_size: float
    nominal_rate: float


def save_checkpoint(
    model: Model,
    path: Path,
    window_size: float,
    nominal_rate: float,
    stats: FeatureStats | None = None,
) -> Path:
    """Writes an .npz holding every named parameter tensor and a JSON header under `__meta__`."""
    meta = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "config": model.config.model_dump(mode="json"),
        "stats": stats.model_dump(mode="json") if stats is not None else None,
        "window_size": window_size,
        "nominal_rate": nominal_rate,
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as fh:
        np.savez(fh, **{_META_KEY: np.array(json.dumps(meta, sort_keys=True))}, **model.params)
    logger.info("✅ Checkpoint saved to %s", path)
    return path


def load_checkpoint(path: Path) -> Checkpoint:
    path = Path(path)
    try:
        with np.load(path, allow_pickle=False) as data:
            meta = json.loads(str(data[_META_KEY]))
            params = {name: data[name] for name in data.files if name != _META_KEY}
    except (OSError, KeyError, ValueError) as e:
        raise ParseError(f"not a readable checkpoint: {e}", source=path.name) from e

    if meta.get("format") != CHECKPOINT_FORMAT:
        raise ParseError(f"unexpected checkpoint format {meta.get('format')!r}", source=path.name)
    if meta.get("version") != CHECKPOINT_VERSION:
        raise ConfigurationError(
            f"{path.name}: checkpoint version {meta.get('version')} is not supported (expected {CHECKPOINT_VERSION})"
        )
    try:
        config = ModelConfig(**meta["config"])
        stats = FeatureStats(**meta["stats"]) if meta.get("stats") else None
    except ValidationError as e:
        raise ConfigurationError(f"{path.name}: invalid checkpoint header: {e}") from e
    return Checkpoint(
        model=Model(config, params),
        stats=stats,
        window_size=float(meta["window_size"]),
        nominal_rate=float(meta["nominal_rate"]),
    )
