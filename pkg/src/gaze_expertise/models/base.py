# File: src/gaze_expertise/models/base.py

from abc import ABC, abstractmethod
from typing import Any, Dict, List, NamedTuple, Tuple

import numpy as np

Params = Dict[str, np.ndarray]
Grads = Dict[str, np.ndarray]


class ParamSpec(NamedTuple):
    shape: Tuple[int, ...]
    fan_in: int
    is_bias: bool


class Layer(ABC):
    """
    Abstract base class for a differentiable layer.
    Layers hold no tensors: parameters live in a flat name -> array dict owned by the
    model, and every forward returns the cache its backward needs.
    """

    def __init__(self, name: str = ""):
        self.name = name

    def parameters(self) -> Dict[str, ParamSpec]:
        """Full parameter name -> spec, in initialization order."""
        return {}

    @abstractmethod
    def forward(self, params: Params, x: np.ndarray) -> Tuple[np.ndarray, Any]:
        pass

    @abstractmethod
    def backward(self, params: Params, dy: np.ndarray, cache: Any) -> Tuple[np.ndarray, Grads]:
        """
        Takes the upstream gradient and returns the input gradient plus the
        gradients of this layer's parameters.
        """
        pass

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name!r})"


class Sequential(Layer):
    def __init__(self, layers: List[Layer], name: str = ""):
        super().__init__(name)
        self.layers = list(layers)

    def parameters(self) -> Dict[str, ParamSpec]:
        specs: Dict[str, ParamSpec] = {}
        for layer in self.layers:
            specs.update(layer.parameters())
        return specs

    def forward(self, params: Params, x: np.ndarray) -> Tuple[np.ndarray, Any]:
        caches = []
        for layer in self.layers:
            x, cache = layer.forward(params, x)
            caches.append(cache)
        return x, caches

    def backward(self, params: Params, dy: np.ndarray, cache: Any) -> Tuple[np.ndarray, Grads]:
        grads: Grads = {}
        for layer, layer_cache in zip(reversed(self.layers), reversed(cache)):
            dy, layer_grads = layer.backward(params, dy, layer_cache)
            grads.update(layer_grads)
        return dy, grads
