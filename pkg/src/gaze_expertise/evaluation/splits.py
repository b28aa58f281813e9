# File: src/gaze_expertise/evaluation/splits.py

import logging
from typing import List, Sequence

import numpy as np
from pydantic import BaseModel, Field, model_validator

from ..core.errors import ParameterError
from ..core.schemas import Label

logger = logging.getLogger(__name__)

# per class: train / val / test participants
SPLIT_SIZES = (4, 1, 1)


class SplitPlan(BaseModel):
    """Participant ids of a subject-disjoint train / val / test split."""
    train: List[str] = Field(description="4 experts + 4 non-experts.")
    val: List[str] = Field(description="1 expert + 1 non-expert.")
    test: List[str] = Field(description="1 expert + 1 non-expert.")
    seed: int

    @model_validator(mode="after")
    def _disjoint(self) -> "SplitPlan":
        train, val, test = set(self.train), set(self.val), set(self.test)
        leaks = (train & val) | (train & test) | (val & test)
        if leaks:
            raise ValueError(f"participants in more than one split: {sorted(leaks)}")
        return self


def _pick(ids: List[str], rng: np.random.Generator) -> tuple[List[str], List[str], List[str]]:
    n_train, n_val, n_test = SPLIT_SIZES
    chosen = [ids[i] for i in rng.choice(len(ids), size=sum(SPLIT_SIZES), replace=False)]
    return chosen[:n_train], chosen[n_train:n_train + n_val], chosen[n_train + n_val:]


def make_split(sessions: Sequence, seed: int) -> SplitPlan:
    """
    Deterministic given the seed and the set of sessions. Items need `participant_id`
    and `label`; ids are sorted first so input order does not matter.
    """
    need = sum(SPLIT_SIZES)
    experts = sorted({s.participant_id for s in sessions if s.label == Label.EXPERT})
    nonexperts = sorted({s.participant_id for s in sessions if s.label == Label.NON_EXPERT})
    if len(experts) < need:
        raise ParameterError(f"insufficient experts: need {need}, have {len(experts)}")
    if len(nonexperts) < need:
        raise ParameterError(f"insufficient non-experts: need {need}, have {len(nonexperts)}")

    rng = np.random.default_rng(seed)
    e_train, e_val, e_test = _pick(experts, rng)
    n_train, n_val, n_test = _pick(nonexperts, rng)
    plan = SplitPlan(
        train=sorted(e_train) + sorted(n_train),
        val=e_val + n_val,
        test=e_test + n_test,
        seed=seed,
    )
    logger.debug("Split %d: train=%s val=%s test=%s", seed, plan.train, plan.val, plan.test)
    return plan
