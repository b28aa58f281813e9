# File: src/gaze_expertise/features/metrics.py

"""Scalar eye-movement metrics computed from a list of fixations."""

from typing import List, Sequence

import numpy as np

from ..core.schemas import Fixation


def average_fixation_duration(fixations: Sequence[Fixation]) -> float:
    """AFD in milliseconds; 0 when there are no fixations."""
    if not fixations:
        return 0.0
    return float(np.mean([f.duration for f in fixations]))


def fixation_count(fixations: Sequence[Fixation]) -> int:
    return len(fixations)


def average_euclidean_distance(fixations: Sequence[Fixation]) -> float:
    """Mean distance between consecutive fixation centroids; 0 with fewer than two fixations."""
    if len(fixations) < 2:
        return 0.0
    centroids = np.array([(f.centroid_x, f.centroid_y) for f in fixations])
    steps = np.diff(centroids, axis=0)
    return float(np.mean(np.hypot(steps[:, 0], steps[:, 1])))


def gaze_relational_index(afd_ms: float, fc: float) -> float:
    """AFD divided by FC, in ms per fixation; 0 when FC is 0."""
    if fc < 0:
        raise ValueError(f"fixation count must be non-negative, got {fc}")
    if fc == 0:
        return 0.0
    return float(afd_ms) / float(fc)


def minmax_rescale(values: Sequence[float]) -> List[float]:
    """Rescales to [0, 1]; a constant sequence maps to zeros."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        return []
    lo, hi = arr.min(), arr.max()
    if hi == lo:
        return [0.0] * arr.size
    return ((arr - lo) / (hi - lo)).tolist()
