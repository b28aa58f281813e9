# File: src/gaze_expertise/synth/profiles.py

import math
from typing import Dict

from pydantic import BaseModel, Field, model_validator

# Average deck composition per category; only Bonafide is "Normal".
DECK_COMPOSITION: Dict[str, int] = {
    "Bonafide": 12,
    "Diseased": 6,
    "TexturedContactLens": 5,
    "GlassProsthesis": 2,
    "ArtificialEye": 1,
    "Printout": 6,
    "ContactLensPrinted": 5,
    "Synthetic": 5,
    "PostMortem": 4,
    "StyleGAN2": 3,
    "StyleGAN3": 3,
}
NORMAL_CATEGORY = "Bonafide"


class BehaviorProfile(BaseModel):
    """
    Generator settings for one group of participants. Durations and amplitudes are
    log-normal, parameterized by their median and log-space sigma.
    """
    fixation_median_ms: float = Field(default=380.0, gt=0.0)
    fixation_sigma: float = Field(default=0.45, ge=0.0)
    min_fixation_ms: float = Field(default=80.0, gt=0.0)
    max_fixation_ms: float = Field(default=4000.0, gt=0.0)
    saccade_median: float = Field(default=0.15, gt=0.0, description="Normalized screen units.")
    saccade_sigma: float = Field(default=0.45, ge=0.0)
    min_saccade_amplitude: float = Field(default=0.06, gt=0.0)
    max_saccade_amplitude: float = Field(default=0.5, gt=0.0, le=0.5)
    fixation_rate: float = Field(default=2.2, gt=0.0, description="Fixations per second.")
    min_saccade_s: float = Field(default=0.02, gt=0.0)
    jitter_std: float = Field(default=0.003, ge=0.0)
    initial_phase_mean_s: float = Field(default=9.5, gt=0.0)
    description_phase_mean_s: float = Field(default=20.5, gt=0.0)
    phase_sigma: float = Field(default=0.35, ge=0.0)
    decision_accuracy: float = Field(default=0.70, ge=0.0, le=1.0)

    @model_validator(mode="after")
    def _bounds(self) -> "BehaviorProfile":
        if self.min_fixation_ms > self.max_fixation_ms:
            raise ValueError("min_fixation_ms must not exceed max_fixation_ms")
        if self.min_saccade_amplitude > self.max_saccade_amplitude:
            raise ValueError("min_saccade_amplitude must not exceed max_saccade_amplitude")
        return self

    @property
    def saccade_duration_s(self) -> float:
        """Transit time that, with the mean fixation duration, yields `fixation_rate`."""
        mean_fixation_s = self.fixation_median_ms / 1000.0 * math.exp(self.fixation_sigma ** 2 / 2.0)
        return max(self.min_saccade_s, 1.0 / self.fixation_rate - mean_fixation_s)

    @classmethod
    def expert(cls, **overrides) -> "BehaviorProfile":
        values = dict(fixation_median_ms=220.0, saccade_median=0.08, fixation_rate=3.5, decision_accuracy=0.85)
        values.update(overrides)
        return cls(**values)

    @classmethod
    def non_expert(cls, **overrides) -> "BehaviorProfile":
        return cls(**overrides)


class SynthSpec(BaseModel):
    n_experts: int = Field(default=6, ge=0)
    n_nonexperts: int = Field(default=53, ge=0)
    images_per_session: int = Field(default=54, ge=1)
    sampling_rate: float = Field(default=200.0, gt=0.0)
    dropout_rate: float = Field(default=0.0, ge=0.0, lt=1.0, description="Fraction of samples lost to low confidence.")
    seed: int = 0
