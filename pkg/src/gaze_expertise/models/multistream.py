# File: src/gaze_expertise/models/multistream.py

import logging
from typing import Any, Dict, List, Literal, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from ..core.errors import ConfigurationError, ContractError, NumericError
from ..core.schemas import Label
from ..features.extract import WindowFeatures, stack_gaze, stack_scalars
from .base import Grads, Layer, ParamSpec, Params, Sequential
from .layers import Conv1d, Dense, GlobalAvgPool1d, ReLU, ResidualBlock, softmax, softmax_cross_entropy

logger = logging.getLogger(__name__)

SCALAR_STREAMS = ("afd", "fc", "aed")
N_CLASSES = 2
EXPERT_CLASS = Label.EXPERT.class_index


class ModelConfig(BaseModel):
    """Widths and depths of the multi-stream classifier."""
    input_length: int = Field(default=1000, ge=2, description="Gaze sequence length L = round(rate x window size).")
    stem_channels: int = Field(default=16, ge=1)
    block_channels: List[int] = Field(default_factory=lambda: [16, 32, 64], min_length=1)
    kernel_size: int = Field(default=7, ge=1)
    scalar_widths: List[int] = Field(default_factory=lambda: [16, 16], min_length=1)
    fusion_hidden: int = Field(default=64, ge=1)
    residual_skip: bool = Field(default=True, description="Wire the identity skip of every residual block.")
    zero_init_head: bool = Field(default=False, description="Zero the output layer so both classes start at 0.5.")
    dtype: Literal["float32", "float64"] = "float32"
    seed: int = 0

    @field_validator("block_channels", "scalar_widths")
    @classmethod
    def _positive(cls, value: List[int]) -> List[int]:
        if any(w < 1 for w in value):
            raise ValueError(f"all widths must be >= 1, got {value}")
        return value

    @field_validator("kernel_size")
    @classmethod
    def _odd(cls, value: int) -> int:
        if value % 2 == 0:
            raise ValueError(f"kernel_size must be odd for length-preserving blocks, got {value}")
        return value

    @model_validator(mode="after")
    def _stem_matches(self) -> "ModelConfig":
        if self.stem_channels != self.block_channels[0]:
            raise ValueError(
                f"stem_channels ({self.stem_channels}) must equal the first block width ({self.block_channels[0]})"
            )
        return self

    @property
    def embedding_size(self) -> int:
        return self.block_channels[-1] + len(SCALAR_STREAMS) * self.scalar_widths[-1]


def build_gaze_stream(config: ModelConfig) -> Sequential:
    k = config.kernel_size
    pad = k // 2
    layers: List[Layer] = [Conv1d("cnn.stem", 2, config.stem_channels, k, 1, pad), ReLU("cnn.stem.relu")]
    prev = config.stem_channels
    for i, width in enumerate(config.block_channels, start=1):
        if i > 1:
            layers += [Conv1d(f"cnn.down{i}", prev, width, k, 2, pad), ReLU(f"cnn.down{i}.relu")]
        layers.append(ResidualBlock(f"cnn.block{i}", width, k, skip=config.residual_skip))
        prev = width
    layers.append(GlobalAvgPool1d("cnn.pool"))
    return Sequential(layers, name="cnn")


def build_scalar_stream(name: str, config: ModelConfig) -> Sequential:
    layers: List[Layer] = []
    prev = 1
    for i, width in enumerate(config.scalar_widths, start=1):
        layers += [Dense(f"{name}.fc{i}", prev, width), ReLU(f"{name}.relu{i}")]
        prev = width
    return Sequential(layers, name=name)


def build_head(config: ModelConfig) -> Sequential:
    return Sequential(
        [
            Dense("fusion.fc1", config.embedding_size, config.fusion_hidden),
            ReLU("fusion.relu1"),
            Dense("fusion.out", config.fusion_hidden, N_CLASSES),
        ],
        name="fusion",
    )


def _collect_specs(gaze_stream: Sequential, scalar_streams: List[Sequential], head: Sequential) -> Dict[str, ParamSpec]:
    specs = dict(gaze_stream.parameters())
    for stream in scalar_streams:
        specs.update(stream.parameters())
    specs.update(head.parameters())
    return specs


class Model:
    """
    Multi-stream classifier: a residual 1-D CNN over the (2, L) gaze sequence and one
    MLP per scalar feature, concatenated into a fusion MLP with a 2-class softmax.
    Class 1 is Expert; its probability is the expertise score.
    """

    def __init__(self, config: ModelConfig, params: Params):
        self.config = config
        self.gaze_stream = build_gaze_stream(config)
        self.scalar_streams = [build_scalar_stream(name, config) for name in SCALAR_STREAMS]
        self.head = build_head(config)
        self.training = False
        specs = self.parameter_specs()
        missing = set(specs) - set(params)
        if missing:
            raise ConfigurationError(f"missing parameters: {sorted(missing)}")
        for name, spec in specs.items():
            if tuple(params[name].shape) != spec.shape:
                raise ConfigurationError(f"{name}: expected shape {spec.shape}, got {params[name].shape}")
        self.params: Params = {name: np.asarray(params[name], dtype=config.dtype) for name in specs}

    def parameter_specs(self) -> Dict[str, ParamSpec]:
        return _collect_specs(self.gaze_stream, self.scalar_streams, self.head)

    def parameter_count(self) -> int:
        return int(sum(p.size for p in self.params.values()))

    def copy(self) -> "Model":
        return Model(self.config, {k: v.copy() for k, v in self.params.items()})

    def logits(self, gaze: np.ndarray, scalars: np.ndarray, params: Params | None = None) -> Tuple[np.ndarray, Any]:
        params = self.params if params is None else params
        gaze = np.asarray(gaze, dtype=self.config.dtype)
        scalars = np.asarray(scalars, dtype=self.config.dtype)
        self._check_input(gaze, scalars)
        embedding, gaze_cache = self.gaze_stream.forward(params, gaze)
        parts = [embedding]
        scalar_caches = []
        for i, stream in enumerate(self.scalar_streams):
            out, cache = stream.forward(params, scalars[:, i:i + 1])
            parts.append(out)
            scalar_caches.append(cache)
        fused = np.concatenate(parts, axis=1)
        logits, head_cache = self.head.forward(params, fused)
        return logits, (gaze_cache, scalar_caches, head_cache, [p.shape[1] for p in parts])

    def backward(self, dlogits: np.ndarray, cache: Any, params: Params | None = None) -> Grads:
        params = self.params if params is None else params
        gaze_cache, scalar_caches, head_cache, widths = cache
        dfused, grads = self.head.backward(params, dlogits.astype(self.config.dtype), head_cache)
        splits = np.cumsum(widths)[:-1]
        dparts = np.split(dfused, splits, axis=1)
        _, g = self.gaze_stream.backward(params, dparts[0], gaze_cache)
        grads.update(g)
        for stream, dpart, cache_i in zip(self.scalar_streams, dparts[1:], scalar_caches):
            _, g = stream.backward(params, dpart, cache_i)
            grads.update(g)
        return grads

    def _check_input(self, gaze: np.ndarray, scalars: np.ndarray) -> None:
        length = self.config.input_length
        if gaze.ndim != 3 or gaze.shape[1:] != (2, length):
            raise ContractError(f"gaze batch must have shape (N, 2, {length}), got {gaze.shape}")
        if scalars.shape != (gaze.shape[0], len(SCALAR_STREAMS)):
            raise ContractError(f"scalar batch must have shape ({gaze.shape[0]}, 3), got {scalars.shape}")


def init_model(config: ModelConfig) -> Model:
    """Fan-in scaled uniform weights (limit sqrt(6 / fan_in)) drawn in a fixed order; zero biases."""
    rng = np.random.default_rng(config.seed)
    specs = _collect_specs(
        build_gaze_stream(config),
        [build_scalar_stream(name, config) for name in SCALAR_STREAMS],
        build_head(config),
    )
    params: Params = {}
    for name, spec in specs.items():
        if spec.is_bias:
            params[name] = np.zeros(spec.shape)
        else:
            limit = np.sqrt(6.0 / spec.fan_in)
            params[name] = rng.uniform(-limit, limit, spec.shape)
    if config.zero_init_head:
        params["fusion.out.weight"] = np.zeros_like(params["fusion.out.weight"])
    model = Model(config, params)
    logger.debug("Initialized model with %d parameters (seed %d)", model.parameter_count(), config.seed)
    return model


Batch = Sequence[WindowFeatures] | Tuple[np.ndarray, np.ndarray]


def as_arrays(batch: Batch) -> Tuple[np.ndarray, np.ndarray]:
    if isinstance(batch, tuple) and len(batch) == 2 and isinstance(batch[0], np.ndarray):
        return batch
    items = list(batch)
    if not items:
        raise ContractError("empty batch")
    return stack_gaze(items), stack_scalars(items)


def as_label_indices(labels: Sequence[Label] | np.ndarray) -> np.ndarray:
    if isinstance(labels, np.ndarray) and labels.dtype.kind in "iu":
        idx = labels.astype(np.int64)
    else:
        idx = np.array([Label.parse(v).class_index for v in labels], dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= N_CLASSES):
        raise ContractError(f"labels must be class indices in [0, {N_CLASSES}), got {np.unique(idx)}")
    return idx


def forward(m: Model, batch: Batch) -> np.ndarray:
    """Softmax scores, shape (N, 2), rows summing to 1."""
    gaze, scalars = as_arrays(batch)
    logits, _ = m.logits(gaze, scalars)
    return softmax(np.asarray(logits, dtype=np.float64))


def loss_and_gradients(
    m: Model,
    batch: Batch,
    labels: Sequence[Label] | np.ndarray,
    batch_index: int | None = None,
    params: Params | None = None,
) -> Tuple[float, Grads]:
    """Mean cross-entropy over the batch and its analytic gradient for every parameter."""
    gaze, scalars = as_arrays(batch)
    y = as_label_indices(labels)
    if y.shape[0] != gaze.shape[0]:
        raise ContractError(f"{gaze.shape[0]} inputs but {y.shape[0]} labels")
    logits, cache = m.logits(gaze, scalars, params)
    loss, _, dlogits = softmax_cross_entropy(logits, y)
    if not np.isfinite(loss):
        raise NumericError(f"non-finite loss {loss}", batch_index=batch_index)
    return loss, m.backward(dlogits, cache, params)


def predict_expertise(m: Model, w: WindowFeatures) -> float:
    return float(forward(m, [w])[0, EXPERT_CLASS])


def predict_scores(m: Model, windows: Sequence[WindowFeatures], chunk_size: int = 64) -> np.ndarray:
    """Expertise score of every window, evaluated in chunks."""
    scores = [
        forward(m, windows[lo:lo + chunk_size])[:, EXPERT_CLASS]
        for lo in range(0, len(windows), chunk_size)
    ]
    return np.concatenate(scores) if scores else np.zeros(0)
