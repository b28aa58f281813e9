import logging
from contextlib import contextmanager

import numpy as np
import pytest

from gaze_expertise.core.schemas import GazeTrack, ImageEvent, Label, Session
from gaze_expertise.features.extract import WindowFeatures
from gaze_expertise.models.multistream import ModelConfig
from gaze_expertise.synth.generator import generate_cohort
from gaze_expertise.synth.profiles import BehaviorProfile, SynthSpec
from gaze_expertise.windowing.slicing import PhaseTag


@contextmanager
def restored_root_logging():
    """The CLI installs its own root handlers; put the test runner's back afterwards."""
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    try:
        yield
    finally:
        for handler in root.handlers[:]:
            if handler not in handlers:
                root.removeHandler(handler)
                handler.close()
        for handler in handlers:
            if handler not in root.handlers:
                root.addHandler(handler)
        root.setLevel(level)


@pytest.fixture(autouse=True)
def _restore_root_logging():
    with restored_root_logging():
        yield


def make_track(t, x, y, confidence=None, rate: float = 200.0) -> GazeTrack:
    t = np.asarray(t, dtype=np.float64)
    x = np.broadcast_to(np.asarray(x, dtype=np.float64), t.shape)
    y = np.broadcast_to(np.asarray(y, dtype=np.float64), t.shape)
    c = np.ones_like(t) if confidence is None else confidence
    return GazeTrack(t=t, x=x, y=y, confidence=c, nominal_rate=rate, raw_count=t.size)


def make_event(image_id: str, shown: float, initial: float, final: float, truth: str = "Bonafide") -> ImageEvent:
    return ImageEvent(
        image_id=image_id,
        shown_at=shown,
        initial_decision_at=initial,
        final_decision_at=final,
        initial_decision="Normal",
        final_decision="Normal",
        ground_truth=truth,
    )


def make_session(track: GazeTrack, events=None, label=Label.EXPERT, participant_id: str = "P01") -> Session:
    if events is None:
        events = [make_event("img_001", 0.0, track.duration / 2, track.duration)]
    return Session(participant_id=participant_id, label=label, track=track, events=events)


def make_window(
    participant_id: str, label: Label, gaze: np.ndarray, afd=0.0, fc=0.0, aed=0.0, index=0
) -> WindowFeatures:
    return WindowFeatures(
        participant_id=participant_id,
        window_index=index,
        start=index * 2.5,
        size=5.0,
        gaze_seq=gaze,
        afd_ms=afd,
        fc=fc,
        aed=aed,
        label=label,
        phase_tag=PhaseTag.MIXED,
    )


@pytest.fixture
def uniform_track():
    """10 s of 200 Hz gaze wandering slowly across the screen."""
    t = np.arange(2000) / 200.0
    return make_track(t, 0.5 + 0.3 * np.sin(t), 0.5 + 0.3 * np.cos(t))


@pytest.fixture
def tiny_config() -> ModelConfig:
    return ModelConfig(
        input_length=16,
        stem_channels=4,
        block_channels=[4, 6],
        kernel_size=3,
        scalar_widths=[3],
        fusion_hidden=5,
        dtype="float64",
        seed=0,
    )


@pytest.fixture(scope="session")
def small_cohort():
    """6 experts and 6 non-experts, two images each (about a minute of gaze per session)."""
    spec = SynthSpec(n_experts=6, n_nonexperts=6, images_per_session=2, seed=7)
    return generate_cohort(BehaviorProfile.expert(), BehaviorProfile.non_expert(), spec)
