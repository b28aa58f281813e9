# File: src/gaze_expertise/parsers/base.py

from abc import abstractmethod
from pathlib import Path
from typing import Generic, TypeVar

from ..core.runnables import Runnable

# The type of the parsed output
Output = TypeVar("Output")


class BaseInputParser(Runnable[bytes | str | Path, Output], Generic[Output]):
    """
    Abstract base class for parsing recorded data.
    Accepts raw bytes, text, or a path to read from, and returns a structured output.
    """

    @abstractmethod
    def parse(self, data: bytes, source: str | None = None) -> Output:
        """Parse the raw bytes."""

    def invoke(self, input: bytes | str | Path, config=None) -> Output:
        if isinstance(input, Path):
            return self.parse(input.read_bytes(), source=input.name)
        if isinstance(input, str):
            return self.parse(input.encode("utf-8"))
        return self.parse(input)
