# File: src/gaze_expertise/core/runnables.py

from __future__ import annotations

from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Generic, List, TypeVar

from pydantic import BaseModel, Field

Input = TypeVar("Input")
Output = TypeVar("Output")


class RunnableConfig(BaseModel):
    """Runtime configuration shared by every stage of a pipeline run."""
    run_id: str | None = None
    tags: List[str] = Field(default_factory=list)
    max_concurrency: int = Field(default=1, ge=1)


class Runnable(Generic[Input, Output], ABC):
    """
    The core interface for every pipeline stage (parsers, detectors, extractors, classifiers).
    Stages share `invoke`/`batch` and can be chained with `|`.
    """

    @abstractmethod
    def invoke(self, input: Input, config: RunnableConfig | None = None) -> Output:
        """Execute the stage on a single input."""

    def batch(self, inputs: List[Input], config: RunnableConfig | None = None) -> List[Output]:
        """
        Process a list of inputs. Runs in a thread pool when `max_concurrency > 1`;
        results always come back in input order.
        """
        workers = config.max_concurrency if config is not None else 1
        if workers <= 1 or len(inputs) <= 1:
            return [self.invoke(i, config) for i in inputs]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda i: self.invoke(i, config), inputs))

    def __or__(self, other: Runnable[Output, Any]) -> RunnableSequence:
        """
        The pipe operator (|) for chaining stages.
        Example: parser | detector | extractor
        """
        return RunnableSequence(first=self, last=other)


class RunnableSequence(Runnable[Input, Output]):
    """Two or more stages chained together."""

    def __init__(self, first: Runnable, last: Runnable):
        self.first = first
        self.middle: list[Runnable] = []
        if isinstance(last, RunnableSequence):
            self.middle.extend([last.first] + last.middle)
            self.last = last.last
        else:
            self.last = last

    @property
    def steps(self) -> list[Runnable]:
        return [self.first, *self.middle, self.last]

    def invoke(self, input: Input, config: RunnableConfig | None = None) -> Output:
        result = self.first.invoke(input, config)
        for runnable in self.middle:
            result = runnable.invoke(result, config)
        return self.last.invoke(result, config)

    def __or__(self, other: Runnable[Output, Any]) -> RunnableSequence:
        """Append another stage to the sequence."""
        if isinstance(other, RunnableSequence):
            self.middle.extend([self.last, other.first] + other.middle)
            self.last = other.last
        else:
            self.middle.append(self.last)
            self.last = other
        return self


class RunnableLambda(Runnable[Input, Output]):
    """Wraps a plain function as a stage."""

    def __init__(self, func):
        self.func = func

    def invoke(self, input: Input, config: RunnableConfig | None = None) -> Output:
        return self.func(input)
