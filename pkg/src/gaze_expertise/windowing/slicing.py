# File: src/gaze_expertise/windowing/slicing.py

import bisect
from enum import Enum
from typing import List

from pydantic import BaseModel, ConfigDict

from ..core.schemas import Fixation, GazeTrack, Label, Session
from .spans import WindowSpan, contained_in, merge_intervals


class PhaseTag(str, Enum):
    INITIAL_ONLY = "InitialOnly"
    MIXED = "Mixed"


class WindowData(BaseModel):
    """The gaze samples and fixations that belong to one window of one session."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    participant_id: str
    span: WindowSpan
    gaze: GazeTrack
    fixations: List[Fixation]
    label: Label
    phase_tag: PhaseTag


def phase_tag_for(session: Session, span: WindowSpan) -> PhaseTag:
    if contained_in(span, merge_intervals(session.initial_phase_intervals())):
        return PhaseTag.INITIAL_ONLY
    return PhaseTag.MIXED


def slice_window(session: Session, span: WindowSpan, fixations: List[Fixation]) -> WindowData:
    """
    Gaze samples with start <= t < end; fixations belong to the window that holds
    their start time, even when they run past the right edge.
    `fixations` must be time-ordered, as `detect_fixations` returns them.
    """
    starts = [f.start for f in fixations]
    lo = bisect.bisect_left(starts, span.start)
    hi = bisect.bisect_left(starts, span.end)
    return WindowData(
        participant_id=session.participant_id,
        span=span,
        gaze=session.track.between(span.start, span.end),
        fixations=list(fixations[lo:hi]),
        label=session.label,
        phase_tag=phase_tag_for(session, span),
    )
