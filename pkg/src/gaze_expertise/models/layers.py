# File: src/gaze_expertise/models/layers.py

from typing import Any, Dict, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..core.errors import ContractError
from .base import Grads, Layer, ParamSpec, Params, Sequential


class Conv1d(Layer):
    """1-D convolution over (batch, channels, length) inputs, computed as im2col + matmul."""

    def __init__(
        self, name: str, in_channels: int, out_channels: int, kernel_size: int, stride: int = 1, padding: int = 0
    ):
        super().__init__(name)
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.kernel_size = kernel_size
        self.stride = stride
        self.padding = padding

    @property
    def weight(self) -> str:
        return f"{self.name}.weight"

    @property
    def bias(self) -> str:
        return f"{self.name}.bias"

    def parameters(self) -> Dict[str, ParamSpec]:
        fan_in = self.in_channels * self.kernel_size
        return {
            self.weight: ParamSpec((self.out_channels, self.in_channels, self.kernel_size), fan_in, False),
            self.bias: ParamSpec((self.out_channels,), fan_in, True),
        }

    def forward(self, params: Params, x: np.ndarray) -> Tuple[np.ndarray, Any]:
        if x.ndim != 3 or x.shape[1] != self.in_channels:
            raise ContractError(f"{self.name}: expected (batch, {self.in_channels}, length), got {x.shape}")
        batch, channels, length = x.shape
        if length + 2 * self.padding < self.kernel_size:
            raise ContractError(f"{self.name}: input length {length} shorter than kernel {self.kernel_size}")
        k, s, p = self.kernel_size, self.stride, self.padding
        xp = np.pad(x, ((0, 0), (0, 0), (p, p))) if p else x
        windows = sliding_window_view(xp, k, axis=2)[:, :, ::s, :]
        out_len = windows.shape[2]
        cols = windows.transpose(0, 2, 1, 3).reshape(batch * out_len, channels * k)
        w = params[self.weight].reshape(self.out_channels, channels * k)
        y = cols @ w.T + params[self.bias]
        y = y.reshape(batch, out_len, self.out_channels).transpose(0, 2, 1)
        return np.ascontiguousarray(y), (cols, x.shape, out_len)

    def backward(self, params: Params, dy: np.ndarray, cache: Any) -> Tuple[np.ndarray, Grads]:
        cols, (batch, channels, length), out_len = cache
        k, s, p = self.kernel_size, self.stride, self.padding
        w = params[self.weight].reshape(self.out_channels, channels * k)
        d2 = dy.transpose(0, 2, 1).reshape(batch * out_len, self.out_channels)
        grads = {
            self.weight: (d2.T @ cols).reshape(self.out_channels, channels, k),
            self.bias: dy.sum(axis=(0, 2)),
        }
        dcols = (d2 @ w).reshape(batch, out_len, channels, k)
        dxp = np.zeros((batch, channels, length + 2 * p), dtype=dy.dtype)
        span = s * (out_len - 1) + 1
        for j in range(k):
            dxp[:, :, j:j + span:s] += dcols[:, :, :, j].transpose(0, 2, 1)
        return dxp[:, :, p:p + length], grads


class Dense(Layer):
    def __init__(self, name: str, in_features: int, out_features: int):
        super().__init__(name)
        self.in_features = in_features
        self.out_features = out_features

    @property
    def weight(self) -> str:
        return f"{self.name}.weight"

    @property
    def bias(self) -> str:
        return f"{self.name}.bias"

    def parameters(self) -> Dict[str, ParamSpec]:
        return {
            self.weight: ParamSpec((self.in_features, self.out_features), self.in_features, False),
            self.bias: ParamSpec((self.out_features,), self.in_features, True),
        }

    def forward(self, params: Params, x: np.ndarray) -> Tuple[np.ndarray, Any]:
        if x.ndim != 2 or x.shape[1] != self.in_features:
            raise ContractError(f"{self.name}: expected (batch, {self.in_features}), got {x.shape}")
        return x @ params[self.weight] + params[self.bias], x

    def backward(self, params: Params, dy: np.ndarray, cache: Any) -> Tuple[np.ndarray, Grads]:
        x = cache
        grads = {self.weight: x.T @ dy, self.bias: dy.sum(axis=0)}
        return dy @ params[self.weight].T, grads


class ReLU(Layer):
    def forward(self, params: Params, x: np.ndarray) -> Tuple[np.ndarray, Any]:
        mask = x > 0
        return np.maximum(x, 0).astype(x.dtype, copy=False), mask

    def backward(self, params: Params, dy: np.ndarray, cache: Any) -> Tuple[np.ndarray, Grads]:
        return np.where(cache, dy, 0).astype(dy.dtype, copy=False), {}


class GlobalAvgPool1d(Layer):
    """(batch, channels, length) -> (batch, channels)."""

    def forward(self, params: Params, x: np.ndarray) -> Tuple[np.ndarray, Any]:
        return x.mean(axis=2), x.shape[2]

    def backward(self, params: Params, dy: np.ndarray, cache: Any) -> Tuple[np.ndarray, Grads]:
        length = cache
        return np.repeat(dy[:, :, None] / length, length, axis=2), {}


class ResidualBlock(Layer):
    """relu(x + conv2(relu(conv1(x)))) with length-preserving convolutions."""

    def __init__(self, name: str, channels: int, kernel_size: int, skip: bool = True):
        super().__init__(name)
        pad = kernel_size // 2
        self.skip = skip
        self.body = Sequential(
            [
                Conv1d(f"{name}.conv1", channels, channels, kernel_size, 1, pad),
                ReLU(f"{name}.relu1"),
                Conv1d(f"{name}.conv2", channels, channels, kernel_size, 1, pad),
            ],
            name=f"{name}.body",
        )
        self.out = ReLU(f"{name}.relu2")

    def parameters(self) -> Dict[str, ParamSpec]:
        return self.body.parameters()

    def forward(self, params: Params, x: np.ndarray) -> Tuple[np.ndarray, Any]:
        h, body_cache = self.body.forward(params, x)
        y, out_cache = self.out.forward(params, h + x if self.skip else h)
        return y, (body_cache, out_cache)

    def backward(self, params: Params, dy: np.ndarray, cache: Any) -> Tuple[np.ndarray, Grads]:
        body_cache, out_cache = cache
        dpre, _ = self.out.backward(params, dy, out_cache)
        dx, grads = self.body.backward(params, dpre, body_cache)
        if self.skip:
            dx = dx + dpre
        return dx, grads


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def softmax_cross_entropy(logits: np.ndarray, labels: np.ndarray) -> Tuple[float, np.ndarray, np.ndarray]:
    """
    Mean cross-entropy of softmax(logits) against integer labels.
    Returns (loss, probabilities, d loss / d logits), all in double precision.
    """
    logits = np.asarray(logits, dtype=np.float64)
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_z = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    log_probs = shifted - log_z
    n = logits.shape[0]
    rows = np.arange(n)
    loss = float(-log_probs[rows, labels].mean())
    probs = softmax(logits)
    dlogits = probs.copy()
    dlogits[rows, labels] -= 1.0
    return loss, probs, dlogits / n
