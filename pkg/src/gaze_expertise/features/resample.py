# File: src/gaze_expertise/features/resample.py

from typing import Tuple

import numpy as np

from ..core.schemas import GazeTrack

# value used for windows with no gaze at all
EMPTY_FILL = 0.5


def resample_gaze(
    gaze: GazeTrack,
    length: int,
    start: float | None = None,
    size: float | None = None,
) -> Tuple[np.ndarray, bool]:
    """
    Linear time-resampling of x(t) and y(t) onto `length` timestamps
    start + k * size / length, k = 0..length-1. Values before the first or after the
    last sample are held at that sample's value.

    Returns a (2, length) array (row 0 = x, row 1 = y) and a flag that is True when
    the slice was empty and the sequence is the constant fill value.
    """
    if length < 2:
        raise ValueError(f"target length must be at least 2, got {length}")
    if len(gaze) == 0:
        return np.full((2, length), EMPTY_FILL, dtype=np.float64), True

    if start is None:
        start = float(gaze.t[0])
    if size is None:
        size = max(gaze.duration - start, 1.0 / gaze.nominal_rate)
    grid = start + np.arange(length, dtype=np.float64) * (size / length)
    seq = np.empty((2, length), dtype=np.float64)
    seq[0] = np.interp(grid, gaze.t, gaze.x)
    seq[1] = np.interp(grid, gaze.t, gaze.y)
    return seq, False
