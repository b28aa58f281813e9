# File: src/gaze_expertise/features/normalize.py

from typing import Dict, List

import numpy as np
from pydantic import BaseModel, Field

from ..core.errors import ParameterError
from .extract import SCALAR_FEATURES, WindowFeatures


class FeatureStats(BaseModel):
    """Training-set mean and population std of each scalar feature."""
    mean: Dict[str, float]
    std: Dict[str, float]
    constant: Dict[str, bool] = Field(default_factory=dict)


def fit_normalizer(train: List[WindowFeatures]) -> FeatureStats:
    if not train:
        raise ParameterError("cannot fit a normalizer on an empty training set")
    values = np.array([[getattr(f, name) for name in SCALAR_FEATURES] for f in train], dtype=np.float64)
    mean = values.mean(axis=0)
    std = values.std(axis=0)
    return FeatureStats(
        mean={name: float(m) for name, m in zip(SCALAR_FEATURES, mean)},
        std={name: float(s) for name, s in zip(SCALAR_FEATURES, std)},
        constant={name: bool(s == 0.0) for name, s in zip(SCALAR_FEATURES, std)},
    )


def apply_normalizer(stats: FeatureStats, features: WindowFeatures) -> WindowFeatures:
    """z-scores AFD, FC and AED; a constant feature maps to 0. The gaze sequence is untouched."""
    update = {}
    for name in SCALAR_FEATURES:
        if stats.constant.get(name, False) or stats.std[name] == 0.0:
            update[name] = 0.0
        else:
            update[name] = (getattr(features, name) - stats.mean[name]) / stats.std[name]
    update["normalized"] = True
    return features.model_copy(update=update)


def normalize_all(stats: FeatureStats, features: List[WindowFeatures]) -> List[WindowFeatures]:
    return [apply_normalizer(stats, f) for f in features]
