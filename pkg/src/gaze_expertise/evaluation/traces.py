# File: src/gaze_expertise/evaluation/traces.py

import logging
from pathlib import Path
from typing import List

import numpy as np
import pandas as pd
from pydantic import BaseModel

from ..core.schemas import Session
from ..detection.idt import IdtParams
from ..features.extract import WindowFeatureExtractor
from ..features.normalize import FeatureStats, normalize_all
from ..models.multistream import Model, predict_scores
from ..stats.mann_whitney import UTestResult, mann_whitney_u
from ..windowing.slicing import PhaseTag

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ["window_index", "start_s", "score", "phase_tag"]


class TracePoint(BaseModel):
    window_index: int
    start: float
    score: float
    phase_tag: PhaseTag


class SoftmaxTrace(BaseModel):
    participant_id: str
    window_size: float
    points: List[TracePoint]

    def __len__(self) -> int:
        return len(self.points)

    @property
    def scores(self) -> np.ndarray:
        return np.array([p.score for p in self.points])

    @property
    def starts(self) -> np.ndarray:
        return np.array([p.start for p in self.points])

    def frame(self) -> pd.DataFrame:
        rows = [(p.window_index, p.start, p.score, p.phase_tag.value) for p in self.points]
        return pd.DataFrame(rows, columns=TRACE_COLUMNS)

    def write_csv(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.frame().to_csv(path, index=False, lineterminator="\n", float_format="%.10g")
        return path


def softmax_trace(
    model: Model,
    session: Session,
    window_size: float,
    stats: FeatureStats | None = None,
    idt: IdtParams | None = None,
) -> SoftmaxTrace:
    """Expertise score of every window of the session, in temporal order."""
    windows = WindowFeatureExtractor(window_size, idt=idt).invoke(session)
    if stats is not None:
        windows = normalize_all(stats, windows)
    scores = predict_scores(model, windows)
    points = [
        TracePoint(window_index=w.window_index, start=w.start, score=float(s), phase_tag=w.phase_tag)
        for w, s in zip(windows, scores)
    ]
    logger.info("-> Trace of %s: %d windows", session.participant_id, len(points))
    return SoftmaxTrace(participant_id=session.participant_id, window_size=window_size, points=points)


def compare_phase_scores(trace: SoftmaxTrace, alpha: float = 0.05) -> UTestResult:
    """Mann-Whitney U of initial-phase window scores against mixed window scores."""
    initial = [p.score for p in trace.points if p.phase_tag == PhaseTag.INITIAL_ONLY]
    mixed = [p.score for p in trace.points if p.phase_tag == PhaseTag.MIXED]
    return mann_whitney_u(initial, mixed, alpha=alpha)
