# File: src/gaze_expertise/core/schemas.py

from __future__ import annotations

from enum import Enum
from typing import Iterator, List, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

DEFAULT_SAMPLING_RATE = 200.0


class Label(str, Enum):
    """Participant's expertise designation. Expert is class index 1."""
    EXPERT = "Expert"
    NON_EXPERT = "NonExpert"

    @property
    def class_index(self) -> int:
        return 1 if self is Label.EXPERT else 0

    @classmethod
    def parse(cls, value: str | Label) -> Label:
        if isinstance(value, Label):
            return value
        key = str(value).strip().replace("-", "").replace("_", "").replace(" ", "").lower()
        if key == "expert":
            return cls.EXPERT
        if key == "nonexpert":
            return cls.NON_EXPERT
        raise ValueError(f"Unknown expertise label: {value!r}")


Decision = Literal["Normal", "Abnormal"]


def _readonly(values, dtype=np.float64) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True).reshape(-1)
    arr.flags.writeable = False
    return arr


class GazeSample(BaseModel):
    """A single normalized gaze position."""
    model_config = ConfigDict(frozen=True)

    t: float = Field(ge=0.0, description="Seconds from session start.")
    x: float = Field(ge=0.0, le=1.0)
    y: float = Field(ge=0.0, le=1.0)
    confidence: float = Field(default=1.0, ge=0.0, le=1.0)


class GazeTrack(BaseModel):
    """
    Time-ordered gaze samples stored column-wise.
    `raw_count` / `dropped_count` record how many rows the parser saw and discarded
    for low confidence, so validation can report data loss after the fact.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    confidence: np.ndarray
    nominal_rate: float = Field(default=DEFAULT_SAMPLING_RATE, gt=0.0)
    raw_count: int = Field(default=0, ge=0)
    dropped_count: int = Field(default=0, ge=0)

    @field_validator("t", "x", "y", "confidence", mode="before")
    @classmethod
    def _as_array(cls, value):
        return _readonly(value)

    @model_validator(mode="after")
    def _check(self) -> GazeTrack:
        n = self.t.shape[0]
        if not (self.x.shape[0] == self.y.shape[0] == self.confidence.shape[0] == n):
            raise ValueError("gaze columns must have equal length")
        if n > 1 and np.any(np.diff(self.t) <= 0):
            raise ValueError("gaze sample times must be strictly increasing")
        if n and self.t[0] < 0:
            raise ValueError("gaze sample times must be non-negative")
        return self

    @classmethod
    def empty(cls, nominal_rate: float = DEFAULT_SAMPLING_RATE) -> GazeTrack:
        return cls(t=[], x=[], y=[], confidence=[], nominal_rate=nominal_rate)

    @classmethod
    def from_samples(cls, samples: List[GazeSample], nominal_rate: float = DEFAULT_SAMPLING_RATE) -> GazeTrack:
        return cls(
            t=[s.t for s in samples],
            x=[s.x for s in samples],
            y=[s.y for s in samples],
            confidence=[s.confidence for s in samples],
            nominal_rate=nominal_rate,
            raw_count=len(samples),
        )

    def __len__(self) -> int:
        return int(self.t.shape[0])

    @property
    def samples(self) -> Iterator[GazeSample]:
        for t, x, y, c in zip(self.t, self.x, self.y, self.confidence):
            yield GazeSample(t=float(t), x=float(x), y=float(y), confidence=float(c))

    @property
    def duration(self) -> float:
        """Seconds from 0 to the end of the last sample's period."""
        if len(self) == 0:
            return 0.0
        return round(float(self.t[-1]) + 1.0 / self.nominal_rate, 6)

    def between(self, start: float, end: float) -> GazeTrack:
        """Samples with start <= t < end."""
        lo = int(np.searchsorted(self.t, start, side="left"))
        hi = int(np.searchsorted(self.t, end, side="left"))
        return GazeTrack(
            t=self.t[lo:hi],
            x=self.x[lo:hi],
            y=self.y[lo:hi],
            confidence=self.confidence[lo:hi],
            nominal_rate=self.nominal_rate,
            raw_count=hi - lo,
        )


class Fixation(BaseModel):
    """A detected dwell. `duration` is in milliseconds."""
    model_config = ConfigDict(frozen=True)

    start: float = Field(ge=0.0, description="Seconds from session start.")
    duration: float = Field(
        ge=0.0,
        description="Milliseconds. The detector's min/max bounds are checked by detect_fixations, not here.",
    )
    centroid_x: float = Field(ge=0.0, le=1.0)
    centroid_y: float = Field(ge=0.0, le=1.0)
    sample_count: int = Field(ge=2)

    @property
    def end(self) -> float:
        return self.start + self.duration / 1000.0


class ImageEvent(BaseModel):
    """One image of the deck and the participant's timed responses to it."""
    model_config = ConfigDict(frozen=True)

    image_id: str
    shown_at: float = Field(ge=0.0)
    initial_decision_at: float
    final_decision_at: float
    initial_decision: Decision
    final_decision: Decision
    ground_truth: str

    @model_validator(mode="after")
    def _ordered(self) -> ImageEvent:
        if not (self.shown_at < self.initial_decision_at <= self.final_decision_at):
            raise ValueError(
                f"image {self.image_id}: expected shown_at < initial_decision_at <= final_decision_at, "
                f"got {self.shown_at}, {self.initial_decision_at}, {self.final_decision_at}"
            )
        return self


class Session(BaseModel):
    """One participant's full recording."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    participant_id: str
    label: Label
    track: GazeTrack
    events: List[ImageEvent] = Field(default_factory=list)

    @field_validator("label", mode="before")
    @classmethod
    def _label(cls, value):
        return Label.parse(value)

    @property
    def duration(self) -> float:
        return self.track.duration

    def initial_phase_intervals(self) -> list[tuple[float, float]]:
        return [(e.shown_at, e.initial_decision_at) for e in self.events]


class ValidationReport(BaseModel):
    """Data-quality summary of one session."""
    participant_id: str
    sample_count: int
    raw_count: int
    dropped_fraction: float
    max_gap_s: float
    ordering_violations: List[str] = Field(default_factory=list)
    coverage_violations: List[str] = Field(default_factory=list)
    violations: List[str] = Field(default_factory=list)
    usable: bool
