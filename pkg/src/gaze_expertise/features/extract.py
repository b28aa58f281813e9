# File: src/gaze_expertise/features/extract.py

import logging
from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..core.runnables import Runnable, RunnableConfig
from ..core.schemas import Fixation, Label, Session
from ..detection.idt import IdtParams, detect_fixations
from ..windowing.slicing import PhaseTag, WindowData, slice_window
from ..windowing.spans import filter_initial_phase, generate_windows
from .metrics import average_euclidean_distance, average_fixation_duration, fixation_count
from .resample import resample_gaze

logger = logging.getLogger(__name__)

SCALAR_FEATURES = ("afd_ms", "fc", "aed")


class WindowFeatures(BaseModel):
    """
    Classifier input for one window: a (2, L) gaze sequence plus the AFD, FC and AED
    scalars. After `apply_normalizer` the scalars hold z-scores and `normalized` is set.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    participant_id: str
    window_index: int = Field(ge=0)
    start: float
    size: float
    gaze_seq: np.ndarray
    afd_ms: float
    fc: float
    aed: float
    label: Label
    phase_tag: PhaseTag = PhaseTag.MIXED
    empty_gaze: bool = False
    normalized: bool = False

    @field_validator("gaze_seq", mode="before")
    @classmethod
    def _seq(cls, value):
        arr = np.asarray(value, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] != 2:
            raise ValueError(f"gaze_seq must have shape (2, L), got {arr.shape}")
        return arr

    @property
    def length(self) -> int:
        return int(self.gaze_seq.shape[1])

    def scalars(self) -> np.ndarray:
        return np.array([self.afd_ms, self.fc, self.aed], dtype=np.float64)


def sequence_length(nominal_rate: float, size: float) -> int:
    return int(round(nominal_rate * size))


def extract_window_features(window: WindowData, nominal_rate: float | None = None) -> WindowFeatures:
    rate = nominal_rate or window.gaze.nominal_rate
    length = sequence_length(rate, window.span.size)
    seq, empty = resample_gaze(window.gaze, length, window.span.start, window.span.size)
    if empty:
        logger.debug("Window %s/%d has no gaze samples", window.participant_id, window.span.index)
    return WindowFeatures(
        participant_id=window.participant_id,
        window_index=window.span.index,
        start=window.span.start,
        size=window.span.size,
        gaze_seq=seq,
        afd_ms=average_fixation_duration(window.fixations),
        fc=float(fixation_count(window.fixations)),
        aed=average_euclidean_distance(window.fixations),
        label=window.label,
        phase_tag=window.phase_tag,
        empty_gaze=empty,
    )


def session_windows(
    session: Session,
    size: float,
    fixations: List[Fixation],
    initial_only: bool = False,
) -> List[WindowData]:
    spans = generate_windows(session.duration, size)
    if initial_only:
        spans = filter_initial_phase(session, spans)
    return [slice_window(session, span, fixations) for span in spans]


class WindowFeatureExtractor(Runnable[Session, List[WindowFeatures]]):
    """Session -> fixations -> windows -> per-window features."""

    def __init__(self, window_size: float, idt: IdtParams | None = None, initial_only: bool = False):
        self.window_size = window_size
        self.idt = idt or IdtParams()
        self.initial_only = initial_only

    def invoke(self, input: Session, config: RunnableConfig | None = None) -> List[WindowFeatures]:
        fixations = detect_fixations(input.track, self.idt)
        windows = session_windows(input, self.window_size, fixations, self.initial_only)
        features = [extract_window_features(w, input.track.nominal_rate) for w in windows]
        logger.info(
            "-> %s: %d fixations, %d windows of %gs%s",
            input.participant_id,
            len(fixations),
            len(features),
            self.window_size,
            " (initial phase only)" if self.initial_only else "",
        )
        return features


def stack_gaze(features: List[WindowFeatures]) -> np.ndarray:
    return np.stack([f.gaze_seq for f in features])


def stack_scalars(features: List[WindowFeatures]) -> np.ndarray:
    return np.stack([f.scalars() for f in features])


def labels_of(features: List[WindowFeatures]) -> np.ndarray:
    return np.array([f.label.class_index for f in features], dtype=np.int64)
