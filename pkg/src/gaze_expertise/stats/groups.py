# File: src/gaze_expertise/stats/groups.py

import json
import logging
from pathlib import Path
from typing import List, Literal, Sequence

import numpy as np
from pydantic import BaseModel, Field

from ..core.errors import ParameterError
from ..core.schemas import Label
from .mann_whitney import Method, mann_whitney_u

logger = logging.getLogger(__name__)

GROUP_FEATURES = ("afd_ms", "fc", "aed")
Direction = Literal["expert lower", "expert higher", "equal"]
Granularity = Literal["window", "image"]


class FeatureComparison(BaseModel):
    feature: str
    u: float
    p: float
    n1: int = Field(description="Expert sample size.")
    n2: int = Field(description="Non-expert sample size.")
    direction: Direction
    significant: bool
    expert_median: float
    nonexpert_median: float


class GroupReport(BaseModel):
    granularity: Granularity = "window"
    alpha: float = 0.05
    features: List[FeatureComparison]

    def feature(self, name: str) -> FeatureComparison:
        for item in self.features:
            if item.feature == name:
                return item
        raise KeyError(name)

    def to_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), indent=2, sort_keys=True) + "\n"

    def write(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json(), encoding="utf-8")
        return path


def _direction(expert_median: float, nonexpert_median: float) -> Direction:
    if expert_median < nonexpert_median:
        return "expert lower"
    if expert_median > nonexpert_median:
        return "expert higher"
    return "equal"


def compare_groups(
    expert: Sequence,
    nonexpert: Sequence,
    alpha: float = 0.05,
    granularity: Granularity = "window",
    method: Method = "auto",
) -> GroupReport:
    """
    Per-feature Mann-Whitney U tests of AFD, FC and AED between the two groups.
    Items are anything carrying `afd_ms`, `fc` and `aed` (window features or per-image
    statistics, per `granularity`).
    """
    if not expert or not nonexpert:
        raise ParameterError(
            f"both groups must be non-empty, got {len(expert)} expert and {len(nonexpert)} non-expert items"
        )
    rows = []
    for name in GROUP_FEATURES:
        a = np.array([getattr(item, name) for item in expert], dtype=np.float64)
        b = np.array([getattr(item, name) for item in nonexpert], dtype=np.float64)
        result = mann_whitney_u(a, b, alpha=alpha, method=method)
        med_a, med_b = float(np.median(a)), float(np.median(b))
        rows.append(
            FeatureComparison(
                feature=name,
                u=result.u_statistic,
                p=result.p_value,
                n1=result.n1,
                n2=result.n2,
                direction=_direction(med_a, med_b),
                significant=result.significant,
                expert_median=med_a,
                nonexpert_median=med_b,
            )
        )
        logger.info("-> %s: U=%.1f p=%.3g (%s)", name, result.u_statistic, result.p_value, rows[-1].direction)
    return GroupReport(granularity=granularity, alpha=alpha, features=rows)


def split_by_label(items: Sequence) -> tuple[list, list]:
    expert = [item for item in items if item.label == Label.EXPERT]
    nonexpert = [item for item in items if item.label == Label.NON_EXPERT]
    return expert, nonexpert
