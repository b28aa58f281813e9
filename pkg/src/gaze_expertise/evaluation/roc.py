# File: src/gaze_expertise/evaluation/roc.py

from pathlib import Path
from typing import List, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field
from scipy.stats import rankdata

from ..core.errors import UndefinedMetricError
from ..core.schemas import Label

MEAN_ROC_STEP = 0.01


class RocCurve(BaseModel):
    """ROC points from (0, 0) to (1, 1), monotone non-decreasing in both coordinates."""
    fpr: List[float]
    tpr: List[float]
    thresholds: List[float] = Field(default_factory=list, description="Score threshold of each point after the first.")
    auroc: float = Field(ge=0.0, le=1.0)

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame({"fpr": self.fpr, "tpr": self.tpr})


def _positives(labels: Sequence) -> np.ndarray:
    """Expert (class 1) is the positive class; accepts Label values, class indices or booleans."""
    out = []
    for v in labels:
        if isinstance(v, (Label, str)):
            out.append(Label.parse(v) == Label.EXPERT)
        else:
            out.append(bool(v))
    return np.array(out, dtype=bool)


def _checked(scores: Sequence[float], labels: Sequence) -> tuple[np.ndarray, np.ndarray]:
    s = np.asarray(scores, dtype=np.float64).ravel()
    pos = _positives(labels)
    if s.shape != pos.shape:
        raise ValueError(f"{s.size} scores but {pos.size} labels")
    n_pos = int(pos.sum())
    if n_pos == 0 or n_pos == pos.size:
        raise UndefinedMetricError(f"AUROC needs both classes, got {n_pos} positives of {pos.size}")
    return s, pos


def auroc(scores: Sequence[float], labels: Sequence) -> float:
    """
    (#{pos > neg} + 0.5 * #{pos == neg}) / (n_pos * n_neg), computed from midranks.
    """
    s, pos = _checked(scores, labels)
    n_pos = int(pos.sum())
    n_neg = pos.size - n_pos
    ranks = rankdata(s)
    return float((ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def roc_curve(scores: Sequence[float], labels: Sequence) -> RocCurve:
    """Threshold sweep over the unique scores in descending order; tied scores move together."""
    s, pos = _checked(scores, labels)
    order = np.argsort(-s, kind="mergesort")
    s_sorted, pos_sorted = s[order], pos[order]
    # last index of each run of equal scores
    last = np.r_[np.nonzero(np.diff(s_sorted))[0], s_sorted.size - 1]
    tp = np.cumsum(pos_sorted)[last]
    fp = np.cumsum(~pos_sorted)[last]
    n_pos, n_neg = tp[-1], fp[-1]
    return RocCurve(
        fpr=[0.0] + (fp / n_neg).tolist(),
        tpr=[0.0] + (tp / n_pos).tolist(),
        thresholds=s_sorted[last].tolist(),
        auroc=auroc(s, pos),
    )


def tpr_at(curve: RocCurve, grid: np.ndarray) -> np.ndarray:
    """Piecewise-linear TPR of the curve at each FPR in `grid`; vertical segments take their top."""
    fpr = np.asarray(curve.fpr)
    tpr = np.asarray(curve.tpr)
    out = np.empty_like(grid, dtype=np.float64)
    for k, g in enumerate(grid):
        i = int(np.searchsorted(fpr, g, side="right")) - 1
        if fpr[i] == g or i == fpr.size - 1:
            out[k] = tpr[i]
        else:
            frac = (g - fpr[i]) / (fpr[i + 1] - fpr[i])
            out[k] = tpr[i] + frac * (tpr[i + 1] - tpr[i])
    return out


def mean_roc(curves: List[RocCurve], step: float = MEAN_ROC_STEP) -> RocCurve:
    """Vertical average of several curves on a fixed FPR grid."""
    if not curves:
        raise ValueError("no curves to average")
    n = int(round(1.0 / step))
    grid = np.linspace(0.0, 1.0, n + 1)
    # the curve starts at (0, 0) even when averaged curves rise vertically at fpr 0
    fpr = np.r_[0.0, grid]
    tpr = np.r_[0.0, np.mean([tpr_at(c, grid) for c in curves], axis=0)]
    area = float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))
    return RocCurve(fpr=fpr.tolist(), tpr=tpr.tolist(), auroc=min(max(area, 0.0), 1.0))


def write_roc_csv(curves: List[tuple[int, RocCurve]], path: Path, mean: RocCurve | None = None) -> Path:
    """One row per point: `curve,fpr,tpr`, where curve is the model seed or `mean`."""
    frames = []
    for seed, curve in curves:
        frame = curve.frame()
        frame.insert(0, "curve", str(seed))
        frames.append(frame)
    if mean is not None:
        frame = mean.frame()
        frame.insert(0, "curve", "mean")
        frames.append(frame)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.concat(frames, ignore_index=True).to_csv(path, index=False, lineterminator="\n", float_format="%.10g")
    return path
