# File: src/gaze_expertise/windowing/spans.py

import math
from typing import List, Sequence

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from ..core.errors import ParameterError
from ..core.schemas import Session

DEFAULT_WINDOW_SIZES = (5.0, 10.0, 15.0, 20.0, 30.0)

# containment tolerance for floating-point window edges
_EDGE_EPS = 1e-9

INVENTORY_COLUMNS = ["participant_id", "window_index", "start_s", "size_s", "phase_tag", "label"]


class WindowSpan(BaseModel):
    """A half-stride window: start = index * size / 2."""
    model_config = ConfigDict(frozen=True)

    start: float = Field(ge=0.0)
    size: float = Field(gt=0.0)
    index: int = Field(ge=0)

    @property
    def end(self) -> float:
        return self.start + self.size


def generate_windows(duration: float, size: float) -> List[WindowSpan]:
    """
    Spans at stride size/2 starting at 0 that fit entirely inside [0, duration].
    Count is floor((duration - size) / (size / 2)) + 1, or 0 when duration < size.
    """
    if not size > 0:
        raise ParameterError(f"window size must be positive, got {size}")
    if duration < size:
        return []
    stride = size / 2.0
    count = math.floor((duration - size) / stride) + 1
    return [WindowSpan(start=k * stride, size=size, index=k) for k in range(count)]


def contained_in(span: WindowSpan, intervals: Sequence[tuple[float, float]]) -> bool:
    return any(lo - _EDGE_EPS <= span.start and span.end <= hi + _EDGE_EPS for lo, hi in intervals)


def merge_intervals(intervals: Sequence[tuple[float, float]]) -> list[tuple[float, float]]:
    merged: list[tuple[float, float]] = []
    for lo, hi in sorted(intervals):
        if merged and lo <= merged[-1][1] + _EDGE_EPS:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return merged


def filter_initial_phase(session: Session, spans: List[WindowSpan]) -> List[WindowSpan]:
    """Keeps spans lying entirely inside the union of [shown_at, initial_decision_at) intervals."""
    intervals = merge_intervals(session.initial_phase_intervals())
    return [span for span in spans if contained_in(span, intervals)]


def inventory_frame(rows: List[dict]) -> pd.DataFrame:
    return pd.DataFrame(rows, columns=INVENTORY_COLUMNS)
