# File: src/gaze_expertise/models/gradcheck.py

"""
Central finite-difference checks of the analytic gradients.

Elements whose perturbation flips any ReLU (the objective is not differentiable
there) are skipped and counted rather than compared.
"""

from typing import Any, Callable, Dict, Tuple

import numpy as np
from pydantic import BaseModel, Field

from .base import Layer, Params
from .layers import softmax_cross_entropy
from .multistream import Model

DEFAULT_STEP = 1e-4


class GradCheckResult(BaseModel):
    relative_error: Dict[str, float] = Field(description="Per tensor ||a - n|| / max(||a|| + ||n||, 1e-12).")
    checked: Dict[str, int]
    skipped: Dict[str, int]

    @property
    def max_error(self) -> float:
        return max(self.relative_error.values(), default=0.0)

    @property
    def skipped_fraction(self) -> float:
        total = sum(self.checked.values()) + sum(self.skipped.values())
        return sum(self.skipped.values()) / total if total else 0.0


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    num = np.linalg.norm(analytic - numeric)
    den = max(np.linalg.norm(analytic) + np.linalg.norm(numeric), 1e-12)
    return float(num / den)


def activation_pattern(cache: Any) -> Tuple[np.ndarray, ...]:
    """Every boolean mask found in a (nested) forward cache."""
    found = []

    def walk(node):
        if isinstance(node, np.ndarray):
            if node.dtype == bool:
                found.append(node)
        elif isinstance(node, (list, tuple)):
            for child in node:
                walk(child)

    walk(cache)
    return tuple(found)


def _same_pattern(a: Tuple[np.ndarray, ...], b: Tuple[np.ndarray, ...]) -> bool:
    return len(a) == len(b) and all(np.array_equal(x, y) for x, y in zip(a, b))


def _check_tensors(
    objective: Callable[[], Tuple[float, Any]],
    tensors: Dict[str, np.ndarray],
    analytic: Dict[str, np.ndarray],
    step: float,
) -> GradCheckResult:
    _, base_cache = objective()
    base = activation_pattern(base_cache)
    errors, checked, skipped = {}, {}, {}
    for name, tensor in tensors.items():
        numeric = np.zeros_like(tensor)
        valid = np.ones(tensor.shape, dtype=bool)
        for i in np.ndindex(tensor.shape):
            original = tensor[i]
            tensor[i] = original + step
            f_plus, cache_plus = objective()
            tensor[i] = original - step
            f_minus, cache_minus = objective()
            tensor[i] = original
            stable = _same_pattern(base, activation_pattern(cache_plus))
            if stable and _same_pattern(base, activation_pattern(cache_minus)):
                numeric[i] = (f_plus - f_minus) / (2.0 * step)
            else:
                valid[i] = False
        errors[name] = relative_error(analytic[name][valid], numeric[valid])
        checked[name] = int(valid.sum())
        skipped[name] = int((~valid).sum())
    return GradCheckResult(relative_error=errors, checked=checked, skipped=skipped)


def check_model_gradients(
    model: Model,
    gaze: np.ndarray,
    scalars: np.ndarray,
    labels: np.ndarray,
    step: float = DEFAULT_STEP,
) -> GradCheckResult:
    """Compares every parameter gradient of the cross-entropy loss. Use a float64 model."""
    params: Params = {k: v.astype(np.float64).copy() for k, v in model.params.items()}

    def objective():
        logits, cache = model.logits(gaze, scalars, params)
        loss, _, _ = softmax_cross_entropy(logits, labels)
        return loss, cache

    logits, cache = model.logits(gaze, scalars, params)
    _, _, dlogits = softmax_cross_entropy(logits, labels)
    analytic = model.backward(dlogits, cache, params)
    return _check_tensors(objective, params, analytic, step)


def check_layer_gradients(
    layer: Layer,
    params: Params,
    x: np.ndarray,
    step: float = DEFAULT_STEP,
    seed: int = 0,
) -> GradCheckResult:
    """
    Checks the input gradient (reported as "input") and every parameter gradient of
    sum(layer(x) * R) for a fixed random projection R.
    """
    x = np.asarray(x, dtype=np.float64).copy()
    params = {k: np.asarray(v, dtype=np.float64).copy() for k, v in params.items()}
    y, cache = layer.forward(params, x)
    projection = np.random.default_rng(seed).standard_normal(y.shape)

    def objective():
        out, c = layer.forward(params, x)
        return float(np.sum(out * projection)), c

    dx, grads = layer.backward(params, projection, cache)
    tensors = {"input": x, **{name: params[name] for name in layer.parameters()}}
    analytic = {"input": dx, **grads}
    return _check_tensors(objective, tensors, analytic, step)


def check_loss_gradient(logits: np.ndarray, labels: np.ndarray, step: float = DEFAULT_STEP) -> float:
    """Relative error of d cross-entropy / d logits."""
    logits = np.asarray(logits, dtype=np.float64).copy()
    _, _, analytic = softmax_cross_entropy(logits, labels)

    def objective():
        return softmax_cross_entropy(logits, labels)[0], ()

    return _check_tensors(objective, {"logits": logits}, {"logits": analytic}, step).relative_error["logits"]
