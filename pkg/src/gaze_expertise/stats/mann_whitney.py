# File: src/gaze_expertise/stats/mann_whitney.py

from itertools import combinations
from typing import Literal, Sequence

import numpy as np
from pydantic import BaseModel, Field, model_validator
from scipy.stats import norm, rankdata, tiecorrect

from ..core.errors import ParameterError

# largest n1 * n2 for which method="auto" enumerates the permutation distribution
EXACT_LIMIT = 64
_P_EPS = 1e-9

Method = Literal["auto", "exact", "normal"]


class UTestResult(BaseModel):
    u_statistic: float = Field(description="#{a_i > b_j} + 0.5 * #{a_i == b_j}.")
    p_value: float = Field(ge=0.0, le=1.0, description="Two-sided p-value.")
    n1: int = Field(ge=1)
    n2: int = Field(ge=1)
    alpha: float = 0.05
    significant: bool
    method: Literal["exact", "normal"]

    @model_validator(mode="after")
    def _u_range(self) -> "UTestResult":
        if not (0.0 <= self.u_statistic <= self.n1 * self.n2):
            raise ValueError(f"U={self.u_statistic} outside [0, {self.n1 * self.n2}]")
        return self


def _u_from_ranks(ranks_a: np.ndarray, n1: int) -> float:
    return float(np.sum(ranks_a) - n1 * (n1 + 1) / 2.0)


def _exact_p(ranks: np.ndarray, n1: int, u_obs: float) -> float:
    """Fraction of all n1-subsets of the pooled midranks at least as extreme as u_obs."""
    mu = n1 * (len(ranks) - n1) / 2.0
    observed = abs(u_obs - mu) - _P_EPS
    offset = n1 * (n1 + 1) / 2.0
    extreme = total = 0
    for subset in combinations(ranks.tolist(), n1):
        total += 1
        if abs(sum(subset) - offset - mu) >= observed:
            extreme += 1
    return extreme / total


def _normal_p(ranks: np.ndarray, n1: int, n2: int, u_obs: float) -> float:
    """Normal approximation with tie-corrected variance and continuity correction."""
    n = n1 + n2
    var = tiecorrect(ranks) * n1 * n2 * (n + 1) / 12.0
    if var <= 0.0:
        return 1.0
    mu = n1 * n2 / 2.0
    z = max(abs(u_obs - mu) - 0.5, 0.0) / np.sqrt(var)
    return float(min(1.0, 2.0 * norm.sf(z)))


def mann_whitney_u(
    a: Sequence[float],
    b: Sequence[float],
    alpha: float = 0.05,
    method: Method = "auto",
) -> UTestResult:
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    n1, n2 = a.size, b.size
    if n1 == 0 or n2 == 0:
        raise ParameterError(f"Mann-Whitney U needs two non-empty samples, got sizes {n1} and {n2}")
    if not (0.0 < alpha < 1.0):
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")

    ranks = rankdata(np.concatenate([a, b]))
    u = _u_from_ranks(ranks[:n1], n1)

    use_exact = method == "exact" or (method == "auto" and n1 * n2 <= EXACT_LIMIT)
    p = _exact_p(ranks, n1, u) if use_exact else _normal_p(ranks, n1, n2, u)
    return UTestResult(
        u_statistic=u,
        p_value=p,
        n1=n1,
        n2=n2,
        alpha=alpha,
        significant=p < alpha,
        method="exact" if use_exact else "normal",
    )
