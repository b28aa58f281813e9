# File: src/gaze_expertise/evaluation/batch.py

import json
import logging
from pathlib import Path
from typing import Dict, List, Literal, Sequence

import numpy as np
from pydantic import BaseModel, Field

from ..core.errors import EvaluationError, GazeExpertiseError, ParameterError
from ..core.runnables import RunnableConfig, RunnableLambda
from ..core.schemas import Session
from ..detection.idt import IdtParams
from ..features.extract import WindowFeatureExtractor, WindowFeatures, labels_of, sequence_length
from ..features.normalize import fit_normalizer, normalize_all
from ..models.multistream import ModelConfig, init_model, predict_scores
from ..models.training import TrainConfig, TrainingHistory, train
from .roc import RocCurve, mean_roc, roc_curve
from .splits import SplitPlan, make_split

logger = logging.getLogger(__name__)

PhaseFilter = Literal["auto", "all", "initial_only"]
# "auto" restricts windows of this size or shorter to the initial decision phase
AUTO_INITIAL_MAX_SIZE = 10.0


class ModelRun(BaseModel):
    seed: int
    auroc: float
    split: SplitPlan
    best_epoch: int | None = None
    n_train_windows: int
    n_test_windows: int
    roc: RocCurve
    history: TrainingHistory


class BatchResult(BaseModel):
    window_size: float
    phase_filter: Literal["all", "initial_only"]
    n_models: int
    mean_auroc: float
    std_auroc: float = Field(description="Sample std across models; 0 for a single model.")
    std_defined: bool = True
    per_model: List[ModelRun]
    mean_roc: RocCurve

    def metrics(self) -> dict:
        return {
            "window_size": self.window_size,
            "phase_filter": self.phase_filter,
            "n_models": self.n_models,
            "mean_auroc": self.mean_auroc,
            "std_auroc": self.std_auroc,
            "std_defined": self.std_defined,
            "per_model": [
                {
                    "seed": run.seed,
                    "auroc": run.auroc,
                    "best_epoch": run.best_epoch,
                    "train": run.split.train,
                    "val": run.split.val,
                    "test": run.split.test,
                }
                for run in self.per_model
            ],
        }

    def write_metrics(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.metrics(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return path


def resolve_phase_filter(phase_filter: PhaseFilter, window_size: float) -> Literal["all", "initial_only"]:
    if phase_filter == "auto":
        return "initial_only" if window_size <= AUTO_INITIAL_MAX_SIZE else "all"
    return phase_filter


def nominal_rate_of(sessions: Sequence[Session]) -> float:
    rates = {s.track.nominal_rate for s in sessions}
    if len(rates) != 1:
        raise ParameterError(f"sessions must share one nominal sampling rate, got {sorted(rates)}")
    return rates.pop()


def extract_cohort(
    sessions: Sequence[Session],
    window_size: float,
    initial_only: bool,
    idt: IdtParams | None = None,
    config: RunnableConfig | None = None,
) -> Dict[str, List[WindowFeatures]]:
    extractor = WindowFeatureExtractor(window_size, idt=idt, initial_only=initial_only)
    per_session = extractor.batch(list(sessions), config)
    return {s.participant_id: feats for s, feats in zip(sessions, per_session)}


def _gather(features: Dict[str, List[WindowFeatures]], ids: List[str]) -> List[WindowFeatures]:
    return [w for pid in ids for w in features[pid]]


def run_model(
    features: Dict[str, List[WindowFeatures]],
    sessions: Sequence[Session],
    seed: int,
    model_config: ModelConfig,
    train_config: TrainConfig,
) -> ModelRun:
    """One split + init + train + test cycle; `seed` drives all three."""
    plan = make_split(sessions, seed)
    train_w = _gather(features, plan.train)
    val_w = _gather(features, plan.val)
    test_w = _gather(features, plan.test)
    if not test_w:
        raise ParameterError(f"test participants {plan.test} have no windows")

    stats = fit_normalizer(train_w)
    train_w, val_w, test_w = (normalize_all(stats, ws) for ws in (train_w, val_w, test_w))
    model = init_model(model_config.model_copy(update={"seed": seed}))
    trained, history = train(model, train_w, val_w, train_config.model_copy(update={"seed": seed}))

    curve = roc_curve(predict_scores(trained, test_w), labels_of(test_w))
    return ModelRun(
        seed=seed,
        auroc=curve.auroc,
        split=plan,
        best_epoch=history.best_epoch,
        n_train_windows=len(train_w),
        n_test_windows=len(test_w),
        roc=curve,
        history=history,
    )


def run_batch(
    sessions: Sequence[Session],
    window_size: float,
    n_models: int = 12,
    phase_filter: PhaseFilter = "auto",
    base_seed: int = 0,
    model_config: ModelConfig | None = None,
    train_config: TrainConfig | None = None,
    idt: IdtParams | None = None,
    config: RunnableConfig | None = None,
) -> BatchResult:
    """
    Trains `n_models` models with seeds base_seed .. base_seed + n_models - 1 and
    reports the mean and sample std of their test AUROCs. Model runs execute in
    parallel when `config.max_concurrency > 1`; results stay in seed order.
    """
    if n_models < 1:
        raise ParameterError(f"n_models must be at least 1, got {n_models}")
    if window_size <= 0:
        raise ParameterError(f"window size must be positive, got {window_size}")
    resolved = resolve_phase_filter(phase_filter, window_size)
    rate = nominal_rate_of(sessions)
    length = sequence_length(rate, window_size)
    model_config = (model_config or ModelConfig()).model_copy(update={"input_length": length})
    train_config = train_config or TrainConfig()

    logger.info(
        "-> Batch of %d models, %gs windows (%s), L=%d, %d sessions",
        n_models, window_size, resolved, length, len(sessions),
    )
    features = extract_cohort(sessions, window_size, resolved == "initial_only", idt, config)

    def one(seed: int) -> ModelRun:
        try:
            run = run_model(features, sessions, seed, model_config, train_config)
        except GazeExpertiseError as e:
            logger.error("🔥 Model run with seed %d failed: %s", seed, e)
            raise EvaluationError(f"model run failed: {e}", seed=seed) from e
        logger.info("✅ Seed %d: test AUROC %.3f", seed, run.auroc)
        return run

    seeds = [base_seed + i for i in range(n_models)]
    runs = RunnableLambda(one).batch(seeds, config)

    aurocs = np.array([r.auroc for r in runs])
    std_defined = n_models > 1
    return BatchResult(
        window_size=window_size,
        phase_filter=resolved,
        n_models=n_models,
        mean_auroc=float(aurocs.mean()),
        std_auroc=float(aurocs.std(ddof=1)) if std_defined else 0.0,
        std_defined=std_defined,
        per_model=runs,
        mean_roc=mean_roc([r.roc for r in runs]),
    )
