# File: src/gaze_expertise/core/validation.py

import logging

import numpy as np
from pydantic import BaseModel, Field

from .schemas import Session, ValidationReport

logger = logging.getLogger(__name__)


class ValidationThresholds(BaseModel):
    max_dropped_fraction: float = Field(default=0.5, ge=0.0, le=1.0)
    max_gap_s: float = Field(default=1.0, gt=0.0)


def validate_session(session: Session, thresholds: ValidationThresholds | None = None) -> ValidationReport:
    """
    Reports data loss, the largest inter-sample gap and event-ordering problems.
    Never raises; a session is unusable when too many samples were dropped or the
    track has a gap longer than the threshold.
    """
    thresholds = thresholds or ValidationThresholds()
    track = session.track

    raw = max(track.raw_count, len(track) + track.dropped_count)
    dropped_fraction = track.dropped_count / raw if raw else 0.0
    max_gap = float(np.max(np.diff(track.t))) if len(track) > 1 else 0.0

    ordering: list[str] = []
    for prev, cur in zip(session.events, session.events[1:]):
        if cur.shown_at < prev.shown_at:
            ordering.append(f"image {cur.image_id} shown before preceding image {prev.image_id}")
        elif cur.shown_at < prev.final_decision_at:
            ordering.append(f"image {cur.image_id} overlaps image {prev.image_id}")

    coverage: list[str] = []
    if len(track):
        t0, t1 = float(track.t[0]), track.duration
        # a lost first or last sample moves the edge by one period
        period = 1.0 / track.nominal_rate
        for event in session.events:
            if event.shown_at < t0 - period or event.final_decision_at > t1 + period:
                coverage.append(
                    f"image {event.image_id} spans [{event.shown_at}, {event.final_decision_at}] "
                    f"outside track range [{t0}, {t1}]"
                )

    violations: list[str] = []
    if dropped_fraction > thresholds.max_dropped_fraction:
        violations.append(f"dropped fraction {dropped_fraction:.3f} exceeds {thresholds.max_dropped_fraction}")
    if max_gap > thresholds.max_gap_s:
        violations.append(f"max gap {max_gap:.3f} s exceeds {thresholds.max_gap_s} s")
    violations.extend(ordering)
    violations.extend(coverage)

    usable = dropped_fraction <= thresholds.max_dropped_fraction and max_gap <= thresholds.max_gap_s
    if not usable:
        logger.warning("Session %s flagged unusable: %s", session.participant_id, "; ".join(violations))

    return ValidationReport(
        participant_id=session.participant_id,
        sample_count=len(track),
        raw_count=raw,
        dropped_fraction=dropped_fraction,
        max_gap_s=max_gap,
        ordering_violations=ordering,
        coverage_violations=coverage,
        violations=violations,
        usable=usable,
    )
