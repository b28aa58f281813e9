from .checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from .multistream import (
    Model,
    ModelConfig,
    forward,
    init_model,
    loss_and_gradients,
    predict_expertise,
    predict_scores,
)
from .training import TrainConfig, TrainingHistory, train

__all__ = [
    "Checkpoint",
    "Model",
    "ModelConfig",
    "TrainConfig",
    "TrainingHistory",
    "forward",
    "init_model",
    "load_checkpoint",
    "loss_and_gradients",
    "predict_expertise",
    "predict_scores",
    "save_checkpoint",
    "train",
]
