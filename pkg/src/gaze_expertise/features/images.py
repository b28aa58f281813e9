# File: src/gaze_expertise/features/images.py

"""Per-image statistics: the fixation metrics of each shown image plus its GRI."""

import bisect
from typing import List

from pydantic import BaseModel, Field

from ..core.schemas import Fixation, Label, Session
from .metrics import (
    average_euclidean_distance,
    average_fixation_duration,
    fixation_count,
    gaze_relational_index,
    minmax_rescale,
)


class ImageStatistics(BaseModel):
    participant_id: str
    label: Label
    image_id: str
    ground_truth: str
    initial_decision: str
    final_decision: str
    start: float
    end: float
    afd_ms: float = Field(ge=0.0)
    fc: float = Field(ge=0.0)
    aed: float = Field(ge=0.0)
    fixation_times: List[float] = Field(default_factory=list, description="Fixation durations in ms.")
    gri: float = Field(ge=0.0, description="AFD / FC, raw ratio.")
    gri_normalized: float = Field(default=0.0, ge=0.0, le=1.0, description="Per-session min-max of gri.")

    def dataset_fields(self) -> dict:
        """The statistic keys of an exported manifest entry."""
        return {
            "average_fixation_time": self.afd_ms,
            "fixation_count": int(self.fc),
            "fixation_times": list(self.fixation_times),
            "average_euclidean_distance": self.aed,
            "gri": self.gri,
            "gri_normalized": self.gri_normalized,
        }


def image_intervals(session: Session) -> List[tuple[float, float]]:
    """Each image runs from its onset to the next onset; the last one to the end of the track."""
    onsets = [e.shown_at for e in session.events]
    ends = onsets[1:] + [max(session.duration, onsets[-1])] if onsets else []
    return list(zip(onsets, ends))


def image_statistics(session: Session, fixations: List[Fixation]) -> List[ImageStatistics]:
    starts = [f.start for f in fixations]
    rows = []
    for event, (start, end) in zip(session.events, image_intervals(session)):
        lo = bisect.bisect_left(starts, start)
        hi = bisect.bisect_left(starts, end)
        own = fixations[lo:hi]
        afd = average_fixation_duration(own)
        fc = fixation_count(own)
        rows.append(
            dict(
                participant_id=session.participant_id,
                label=session.label,
                image_id=event.image_id,
                ground_truth=event.ground_truth,
                initial_decision=event.initial_decision,
                final_decision=event.final_decision,
                start=start,
                end=end,
                afd_ms=afd,
                fc=float(fc),
                aed=average_euclidean_distance(own),
                fixation_times=[f.duration for f in own],
                gri=gaze_relational_index(afd, fc),
            )
        )
    for row, scaled in zip(rows, minmax_rescale([r["gri"] for r in rows])):
        row["gri_normalized"] = scaled
    return [ImageStatistics(**row) for row in rows]
