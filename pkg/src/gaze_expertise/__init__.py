# File: src/gaze_expertise/__init__.py

from .core.errors import GazeExpertiseError
from .core.runnables import Runnable, RunnableConfig, RunnableLambda, RunnableSequence
from .core.schemas import Fixation, GazeTrack, ImageEvent, Label, Session

__version__ = "1.0"

__all__ = [
    "Fixation",
    "GazeExpertiseError",
    "GazeTrack",
    "ImageEvent",
    "Label",
    "Runnable",
    "RunnableConfig",
    "RunnableLambda",
    "RunnableSequence",
    "Session",
]
