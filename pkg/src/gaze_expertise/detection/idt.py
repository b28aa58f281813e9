# File: src/gaze_expertise/detection/idt.py

"""Dispersion-threshold (I-DT) fixation identification."""

import logging
from pathlib import Path
from typing import List

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, model_validator

from ..core.errors import ContractError
from ..core.runnables import Runnable, RunnableConfig
from ..core.schemas import Fixation, GazeTrack

logger = logging.getLogger(__name__)

# tolerance on millisecond comparisons, absorbs float error in sample times
_MS_EPS = 1e-6

FIXATION_COLUMNS = ["start_s", "duration_ms", "cx", "cy", "sample_count"]


class IdtParams(BaseModel):
    dispersion_threshold: float = Field(
        default=0.05, gt=0.0, lt=1.0, description="(max x - min x) + (max y - min y), normalized units."
    )
    min_duration_ms: float = Field(default=80.0, gt=0.0)
    max_duration_ms: float = Field(default=4000.0, gt=0.0)

    @model_validator(mode="after")
    def _bounds(self):
        if self.min_duration_ms > self.max_duration_ms:
            raise ValueError("min_duration_ms must not exceed max_duration_ms")
        return self


def _fixation(t: np.ndarray, x: np.ndarray, y: np.ndarray, i: int, j: int) -> Fixation:
    return Fixation(
        start=float(t[i]),
        duration=float((t[j] - t[i]) * 1000.0),
        centroid_x=float(np.clip(x[i : j + 1].mean(), 0.0, 1.0)),
        centroid_y=float(np.clip(y[i : j + 1].mean(), 0.0, 1.0)),
        sample_count=j - i + 1,
    )


def detect_fixations(track: GazeTrack, params: IdtParams | None = None) -> List[Fixation]:
    """
    I-DT over a time-sorted track.

    A window starting at sample i is first extended to cover `min_duration_ms`. If its
    dispersion is above the threshold the window start advances by one sample;
    otherwise samples are added while dispersion stays within the threshold and the
    span stays within `max_duration_ms`. An over-long dwell is closed at the maximum
    and a new window begins at the next sample.
    """
    params = params or IdtParams()
    t, x, y = track.t, track.x, track.y
    n = len(track)
    fixations: List[Fixation] = []
    min_s = (params.min_duration_ms - _MS_EPS) / 1000.0
    max_s = (params.max_duration_ms + _MS_EPS) / 1000.0
    thr = params.dispersion_threshold

    i = 0
    while i < n:
        # smallest j with t[j] - t[i] >= min duration
        j = int(np.searchsorted(t, t[i] + min_s, side="left"))
        if j >= n:
            break
        if t[j] - t[i] > max_s:
            # sampling gap longer than a fixation can last
            i += 1
            continue
        xmin, xmax = x[i : j + 1].min(), x[i : j + 1].max()
        ymin, ymax = y[i : j + 1].min(), y[i : j + 1].max()
        if (xmax - xmin) + (ymax - ymin) > thr:
            i += 1
            continue
        while j + 1 < n and t[j + 1] - t[i] <= max_s:
            nx, ny = x[j + 1], y[j + 1]
            cand = (max(xmax, nx) - min(xmin, nx)) + (max(ymax, ny) - min(ymin, ny))
            if cand > thr:
                break
            xmin, xmax = min(xmin, nx), max(xmax, nx)
            ymin, ymax = min(ymin, ny), max(ymax, ny)
            j += 1
        fixations.append(_fixation(t, x, y, i, j))
        i = j + 1

    check_fixation_durations(fixations, params)
    logger.debug("-> Detected %d fixations in %d samples", len(fixations), n)
    return fixations


def check_fixation_durations(fixations: List[Fixation], params: IdtParams) -> None:
    """Raises ContractError for any fixation outside [min_duration_ms, max_duration_ms]."""
    for f in fixations:
        if not (params.min_duration_ms - 2 * _MS_EPS <= f.duration <= params.max_duration_ms + 2 * _MS_EPS):
            raise ContractError(
                f"fixation at {f.start:.3f} s lasts {f.duration:.3f} ms, outside "
                f"[{params.min_duration_ms}, {params.max_duration_ms}] ms"
            )


def fixations_frame(fixations: List[Fixation]) -> pd.DataFrame:
    return pd.DataFrame(
        [(f.start, f.duration, f.centroid_x, f.centroid_y, f.sample_count) for f in fixations],
        columns=FIXATION_COLUMNS,
    )


def write_fixations_csv(fixations: List[Fixation], path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fixations_frame(fixations).to_csv(path, index=False)
    return path


class FixationDetector(Runnable[GazeTrack, List[Fixation]]):
    """Runnable stage wrapping `detect_fixations`."""

    def __init__(self, params: IdtParams | None = None):
        self.params = params or IdtParams()

    def invoke(self, input: GazeTrack, config: RunnableConfig | None = None) -> List[Fixation]:
        return detect_fixations(input, self.params)
