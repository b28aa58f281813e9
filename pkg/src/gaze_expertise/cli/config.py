# File: src/gaze_expertise/cli/config.py

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, List, Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..core.errors import ConfigurationError
from ..core.validation import ValidationThresholds
from ..detection.idt import IdtParams
from ..evaluation.batch import PhaseFilter
from ..features.heatmap import HeatmapParams
from ..models.multistream import ModelConfig
from ..models.training import TrainConfig
from ..parsers.gaze_csv import GazeCsvOptions
from ..synth.profiles import BehaviorProfile, SynthSpec
from ..windowing.spans import DEFAULT_WINDOW_SIZES


class PathsConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    out: Path = Field(default=Path("runs/latest"), description="Output directory of the run.")
    sessions: Path | None = Field(default=None, description="Session store (manifests + gaze CSV directories).")
    features: Path | None = Field(default=None, description="Directory holding features_<size>s.npz files.")
    checkpoint: Path | None = None


class StatsConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    alpha: float = Field(default=0.05, gt=0.0, lt=1.0)
    granularity: Literal["window", "image"] = "window"


class RunConfig(BaseModel):
    """Every parameter of a run. Unknown keys anywhere in the tree are rejected."""
    model_config = ConfigDict(extra="forbid")

    seed: int = 0
    window_sizes: List[float] = Field(default_factory=lambda: list(DEFAULT_WINDOW_SIZES), min_length=1)
    phase_filter: PhaseFilter = "auto"
    n_models: int = Field(default=12, ge=1)
    max_concurrency: int = Field(default=1, ge=1)
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "INFO"
    plots: bool = False
    paths: PathsConfig = Field(default_factory=PathsConfig)
    gaze: GazeCsvOptions = Field(default_factory=GazeCsvOptions)
    validation: ValidationThresholds = Field(default_factory=ValidationThresholds)
    idt: IdtParams = Field(default_factory=IdtParams)
    heatmap: HeatmapParams = Field(default_factory=HeatmapParams)
    stats: StatsConfig = Field(default_factory=StatsConfig)
    model: ModelConfig = Field(default_factory=ModelConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    synth: SynthSpec = Field(default_factory=SynthSpec)
    expert_profile: BehaviorProfile = Field(default_factory=BehaviorProfile.expert)
    nonexpert_profile: BehaviorProfile = Field(default_factory=BehaviorProfile.non_expert)

    @model_validator(mode="before")
    @classmethod
    def _no_unknown_keys(cls, data: Any) -> Any:
        if isinstance(data, dict):
            _reject_unknown(data, cls, "")
        return data


def _reject_unknown(data: Dict[str, Any], model: type[BaseModel], prefix: str) -> None:
    """Walks nested sections so that a typo in e.g. [train] fails too."""
    fields = model.model_fields
    unknown = sorted(set(data) - set(fields))
    if unknown:
        where = prefix.rstrip(".") or "top level"
        raise ValueError(f"unknown key(s) {unknown} in {where}")
    for name, value in data.items():
        annotation = fields[name].annotation
        if isinstance(value, dict) and isinstance(annotation, type) and issubclass(annotation, BaseModel):
            _reject_unknown(value, annotation, f"{prefix}{name}.")


def _merge(base: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_run_config(path: Path | None = None, overrides: Dict[str, Any] | None = None) -> RunConfig:
    """TOML file values, then command-line overrides on top."""
    data: Dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        try:
            data = tomllib.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError as e:
            raise ConfigurationError(f"config file not found: {path}") from e
        except tomllib.TOMLDecodeError as e:
            raise ConfigurationError(f"{path.name}: invalid TOML: {e}") from e
    try:
        return RunConfig.model_validate(_merge(data, overrides or {}))
    except ValidationError as e:
        raise ConfigurationError(f"invalid configuration: {e}") from e
