# File: src/gaze_expertise/core/errors.py

"""Exception hierarchy. Every error carries a short machine-readable `category`."""


class GazeExpertiseError(Exception):
    category = "error"

    def to_dict(self) -> dict:
        return {"error": self.category, "message": str(self)}


class ParseError(GazeExpertiseError, ValueError):
    """A malformed row in a gaze CSV or a malformed manifest."""
    category = "parse_error"

    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        self.source = source
        where = ""
        if source:
            where += f"{source}: "
        if line is not None:
            where += f"line {line}: "
        super().__init__(f"{where}{message}")


class EmptyTrackError(GazeExpertiseError, ValueError):
    category = "empty_track"


class ResolutionError(GazeExpertiseError, FileNotFoundError):
    """A raw-gaze pointer that does not resolve to a file."""
    category = "resolution_error"

    def __init__(self, pointer: str, directory: str):
        self.pointer = pointer
        self.directory = directory
        super().__init__(f"raw gaze pointer '{pointer}' not found in {directory}")


class SessionValidationError(GazeExpertiseError, ValueError):
    category = "validation_error"


class ParameterError(GazeExpertiseError, ValueError):
    category = "parameter_error"


class ConfigurationError(GazeExpertiseError, ValueError):
    category = "configuration_error"


class ContractError(GazeExpertiseError, ValueError):
    """Inputs whose shapes do not match what a model was built for."""
    category = "contract_error"


class NumericError(GazeExpertiseError, ArithmeticError):
    category = "numeric_error"

    def __init__(self, message: str, batch_index: int | None = None):
        self.batch_index = batch_index
        if batch_index is not None:
            message = f"{message} (batch {batch_index})"
        super().__init__(message)


class UndefinedMetricError(GazeExpertiseError, ValueError):
    category = "undefined_metric"


class EvaluationError(GazeExpertiseError, RuntimeError):
    """A model run inside a batch failed; carries the seed of that run."""
    category = "evaluation_error"

    def __init__(self, message: str, seed: int | None = None):
        self.seed = seed
        super().__init__(message)
