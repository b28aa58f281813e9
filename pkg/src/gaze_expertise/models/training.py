# File: src/gaze_expertise/models/training.py

import logging
import math
from pathlib import Path
from typing import List, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field

from ..core.errors import ParameterError, UndefinedMetricError
from ..evaluation.roc import auroc
from ..features.extract import WindowFeatures, labels_of, stack_gaze, stack_scalars
from .multistream import Model, loss_and_gradients, predict_scores

logger = logging.getLogger(__name__)

HISTORY_COLUMNS = ["epoch", "train_loss", "val_auroc", "learning_rate"]


class TrainConfig(BaseModel):
    """Mini-batch SGD with momentum, cosine learning-rate decay and early stopping on validation AUROC."""
    learning_rate: float = Field(default=1e-3, gt=0.0)
    min_learning_rate: float = Field(default=0.0, ge=0.0)
    cosine_decay: bool = True
    momentum: float = Field(default=0.9, ge=0.0, lt=1.0)
    batch_size: int = Field(default=32, ge=1)
    epochs: int = Field(default=30, ge=1)
    early_stopping: bool = True
    patience: int = Field(default=5, ge=1)
    class_balanced: bool = Field(default=True, description="Draw each batch half from each class.")
    seed: int = 0


class EpochRecord(BaseModel):
    epoch: int
    train_loss: float
    val_auroc: float | None = Field(default=None, description="None when the validation set holds one class.")
    learning_rate: float


class TrainingHistory(BaseModel):
    records: List[EpochRecord] = Field(default_factory=list)
    best_epoch: int | None = None
    best_val_auroc: float | None = None
    stopped_early: bool = False

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame([r.model_dump() for r in self.records], columns=HISTORY_COLUMNS)

    def write_csv(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.frame().to_csv(path, index=False, lineterminator="\n", float_format="%.10g")
        return path


def learning_rate_at(tc: TrainConfig, step: int, total_steps: int) -> float:
    if not tc.cosine_decay or total_steps <= 1:
        return tc.learning_rate
    progress = step / total_steps
    return tc.min_learning_rate + 0.5 * (tc.learning_rate - tc.min_learning_rate) * (1.0 + math.cos(math.pi * progress))


def epoch_batches(labels: np.ndarray, tc: TrainConfig, rng: np.random.Generator) -> List[np.ndarray]:
    n = labels.size
    if n <= tc.batch_size:
        return [np.arange(n)]
    steps = math.ceil(n / tc.batch_size)
    classes = [np.flatnonzero(labels == c) for c in (0, 1)]
    if tc.class_balanced and all(c.size for c in classes):
        half = tc.batch_size // 2
        return [
            np.concatenate([
                rng.choice(classes[1], size=tc.batch_size - half, replace=True),
                rng.choice(classes[0], size=half, replace=True),
            ])
            for _ in range(steps)
        ]
    order = rng.permutation(n)
    return [order[lo:lo + tc.batch_size] for lo in range(0, n, tc.batch_size)]


def validation_auroc(model: Model, windows: Sequence[WindowFeatures]) -> float | None:
    try:
        return auroc(predict_scores(model, windows), labels_of(windows))
    except UndefinedMetricError:
        return None


def train(
    model: Model,
    train_windows: Sequence[WindowFeatures],
    val_windows: Sequence[WindowFeatures],
    tc: TrainConfig | None = None,
) -> Tuple[Model, TrainingHistory]:
    """
    Returns the checkpoint with the best validation AUROC (earliest on ties; the last
    epoch when AUROC is never defined) and the per-epoch history.
    """
    tc = tc or TrainConfig()
    if not train_windows:
        raise ParameterError("training split is empty")
    if not val_windows:
        raise ParameterError("validation split is empty")
    shared = {w.participant_id for w in train_windows} & {w.participant_id for w in val_windows}
    if shared:
        raise ParameterError(f"participants in both training and validation splits: {sorted(shared)}")

    model = model.copy()
    model.training = True
    dtype = model.config.dtype
    gaze = stack_gaze(train_windows).astype(dtype)
    scalars = stack_scalars(train_windows).astype(dtype)
    labels = labels_of(train_windows)
    rng = np.random.default_rng(tc.seed)
    velocity = {name: np.zeros_like(p) for name, p in model.params.items()}

    steps_per_epoch = 1 if labels.size <= tc.batch_size else math.ceil(labels.size / tc.batch_size)
    total_steps = tc.epochs * steps_per_epoch
    history = TrainingHistory()
    best_params = None
    since_best = 0
    step = 0

    for epoch in range(1, tc.epochs + 1):
        epoch_lr = learning_rate_at(tc, step, total_steps)
        losses = []
        for idx in epoch_batches(labels, tc, rng):
            lr = learning_rate_at(tc, step, total_steps)
            loss, grads = loss_and_gradients(model, (gaze[idx], scalars[idx]), labels[idx], batch_index=step)
            for name, g in grads.items():
                v = velocity[name]
                v *= tc.momentum
                v += g
                model.params[name] -= np.asarray(lr * v, dtype=dtype)
            losses.append(loss)
            step += 1

        val = validation_auroc(model, val_windows)
        record = EpochRecord(epoch=epoch, train_loss=float(np.mean(losses)), val_auroc=val, learning_rate=epoch_lr)
        history.records.append(record)
        logger.info(
            "-> Epoch %d/%d: loss %.4f, val AUROC %s",
            epoch, tc.epochs, record.train_loss, "n/a" if val is None else f"{val:.3f}",
        )

        if val is not None and (history.best_val_auroc is None or val > history.best_val_auroc):
            history.best_val_auroc = val
            history.best_epoch = epoch
            best_params = {k: p.copy() for k, p in model.params.items()}
            since_best = 0
        else:
            since_best += 1
        if tc.early_stopping and history.best_epoch is not None and since_best >= tc.patience:
            history.stopped_early = epoch < tc.epochs
            logger.info("Early stop after epoch %d (best epoch %d)", epoch, history.best_epoch)
            break

    if best_params is not None:
        model.params = best_params
    model.training = False
    return model, history
