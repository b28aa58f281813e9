# File: src/gaze_expertise/evaluation/plots.py

from pathlib import Path
from typing import List

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .roc import RocCurve  # noqa: E402
from .traces import SoftmaxTrace  # noqa: E402


def plot_roc(curves: List[RocCurve], mean: RocCurve | None, path: Path, title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(5, 5))
    for curve in curves:
        ax.plot(curve.fpr, curve.tpr, color="tab:blue", alpha=0.25, linewidth=1)
    if mean is not None:
        ax.plot(mean.fpr, mean.tpr, color="tab:blue", linewidth=2, label=f"mean (AUROC {mean.auroc:.3f})")
        ax.legend(loc="lower right")
    ax.plot([0, 1], [0, 1], color="grey", linestyle="--", linewidth=1)
    ax.set_xlabel("False positive rate")
    ax.set_ylabel("True positive rate")
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    if title:
        ax.set_title(title)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_trace(trace: SoftmaxTrace, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(8, 3))
    ax.plot(trace.starts, trace.scores, linewidth=1)
    ax.axhline(0.5, color="grey", linestyle="--", linewidth=1)
    ax.set_ylim(0, 1)
    ax.set_xlabel("Window start (s)")
    ax.set_ylabel("Expertise score")
    ax.set_title(f"{trace.participant_id}, {trace.window_size:g}s windows")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path
