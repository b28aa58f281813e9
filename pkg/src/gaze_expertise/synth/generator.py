# File: src/gaze_expertise/synth/generator.py

import logging
from typing import List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from ..core.runnables import RunnableConfig, RunnableLambda
from ..core.schemas import Fixation, GazeTrack, ImageEvent, Label, Session
from .profiles import DECK_COMPOSITION, NORMAL_CATEGORY, BehaviorProfile, SynthSpec

logger = logging.getLogger(__name__)

_MIN_PHASE_S = 1.0


class ProfileSegment(BaseModel):
    """Replaces the session's profile for fixations starting inside [start, end)."""
    start: float = Field(ge=0.0)
    end: float
    profile: BehaviorProfile


def reflect(values: np.ndarray) -> np.ndarray:
    """Folds values back into [0, 1] at both edges."""
    v = np.mod(values, 2.0)
    return np.where(v > 1.0, 2.0 - v, v)


def _lognormal(rng: np.random.Generator, median: float, sigma: float) -> float:
    return float(rng.lognormal(np.log(median), sigma))


def _phase_length(rng: np.random.Generator, mean: float, sigma: float) -> float:
    # log-normal parameterized by its mean
    mu = np.log(mean) - sigma ** 2 / 2.0
    return max(_MIN_PHASE_S, float(rng.lognormal(mu, sigma)))


def _decision(rng: np.random.Generator, correct: str, accuracy: float) -> str:
    if rng.random() < accuracy:
        return correct
    return "Abnormal" if correct == "Normal" else "Normal"


def generate_events(profile: BehaviorProfile, n_images: int, rng: np.random.Generator) -> List[ImageEvent]:
    """Back-to-back images, each with an initial and a description phase."""
    categories = list(DECK_COMPOSITION)
    weights = np.array(list(DECK_COMPOSITION.values()), dtype=np.float64)
    weights /= weights.sum()
    events = []
    t = 0.0
    for i in range(1, n_images + 1):
        initial = _phase_length(rng, profile.initial_phase_mean_s, profile.phase_sigma)
        description = _phase_length(rng, profile.description_phase_mean_s, profile.phase_sigma)
        category = categories[int(rng.choice(len(categories), p=weights))]
        correct = "Normal" if category == NORMAL_CATEGORY else "Abnormal"
        shown = round(t, 3)
        initial_at = round(t + initial, 3)
        final_at = round(t + initial + description, 3)
        events.append(
            ImageEvent(
                image_id=f"img_{i:03d}",
                shown_at=shown,
                initial_decision_at=initial_at,
                final_decision_at=final_at,
                initial_decision=_decision(rng, correct, profile.decision_accuracy),
                final_decision=_decision(rng, correct, profile.decision_accuracy),
                ground_truth=category,
            )
        )
        t = final_at
    return events


def _next_location(pos: np.ndarray, profile: BehaviorProfile, rng: np.random.Generator) -> np.ndarray:
    amplitude = float(np.clip(
        _lognormal(rng, profile.saccade_median, profile.saccade_sigma),
        profile.min_saccade_amplitude,
        profile.max_saccade_amplitude,
    ))
    angle = rng.uniform(0.0, 2.0 * np.pi)
    step = amplitude * np.array([np.cos(angle), np.sin(angle)])
    target = pos + step
    # a component that would leave the screen is mirrored
    outside = (target < 0.0) | (target > 1.0)
    target[outside] = pos[outside] - step[outside]
    return target


def _profile_at(t: float, base: BehaviorProfile, overrides: Sequence[ProfileSegment]) -> BehaviorProfile:
    for seg in overrides:
        if seg.start <= t < seg.end:
            return seg.profile
    return base


def simulate_session(
    profile: BehaviorProfile,
    label: Label | str,
    participant_id: str,
    images_per_session: int = 54,
    sampling_rate: float = 200.0,
    seed: int = 0,
    dropout_rate: float = 0.0,
    overrides: Sequence[ProfileSegment] = (),
) -> Tuple[Session, List[Fixation]]:
    """
    Alternating fixation / saccade process sampled at `sampling_rate`. Returns the
    session and the fixations as generated (start, span of their samples, true center).
    """
    rng = np.random.default_rng(seed)
    events = generate_events(profile, images_per_session, rng)
    total = int(np.ceil(events[-1].final_decision_at * sampling_rate))

    xs = np.empty(total, dtype=np.float64)
    ys = np.empty(total, dtype=np.float64)
    truth: List[Fixation] = []
    pos = rng.uniform(0.25, 0.75, size=2)
    k = 0
    while k < total:
        current = _profile_at(k / sampling_rate, profile, overrides)
        dur_ms = float(np.clip(
            _lognormal(rng, current.fixation_median_ms, current.fixation_sigma),
            current.min_fixation_ms,
            current.max_fixation_ms,
        ))
        n_fix = min(int(round(dur_ms / 1000.0 * sampling_rate)) + 1, total - k)
        jitter = rng.normal(0.0, current.jitter_std, size=(n_fix, 2))
        xs[k:k + n_fix] = reflect(pos[0] + jitter[:, 0])
        ys[k:k + n_fix] = reflect(pos[1] + jitter[:, 1])
        if n_fix >= 2:
            truth.append(
                Fixation(
                    start=k / sampling_rate,
                    duration=(n_fix - 1) * 1000.0 / sampling_rate,
                    centroid_x=float(pos[0]),
                    centroid_y=float(pos[1]),
                    sample_count=n_fix,
                )
            )
        k += n_fix
        if k >= total:
            break

        target = _next_location(pos, current, rng)
        n_sac = min(max(1, int(round(current.saccade_duration_s * sampling_rate))), total - k)
        frac = np.arange(1, n_sac + 1) / (n_sac + 1)
        xs[k:k + n_sac] = pos[0] + frac * (target[0] - pos[0])
        ys[k:k + n_sac] = pos[1] + frac * (target[1] - pos[1])
        k += n_sac
        pos = target

    t = np.arange(total, dtype=np.float64) / sampling_rate
    keep = rng.random(total) >= dropout_rate if dropout_rate > 0 else np.ones(total, dtype=bool)
    track = GazeTrack(
        t=t[keep],
        x=xs[keep],
        y=ys[keep],
        confidence=np.ones(int(keep.sum())),
        nominal_rate=sampling_rate,
        raw_count=total,
        dropped_count=int(total - keep.sum()),
    )
    session = Session(participant_id=participant_id, label=label, track=track, events=events)
    logger.debug("Simulated %s: %.1fs, %d fixations", participant_id, session.duration, len(truth))
    return session, truth


def generate_session(
    profile: BehaviorProfile,
    label: Label | str,
    participant_id: str,
    images_per_session: int = 54,
    sampling_rate: float = 200.0,
    seed: int = 0,
    dropout_rate: float = 0.0,
) -> Session:
    session, _ = simulate_session(
        profile, label, participant_id, images_per_session, sampling_rate, seed, dropout_rate
    )
    return session


def cohort_seeds(seed: int, n: int) -> List[int]:
    return [int(child.generate_state(1)[0]) for child in np.random.SeedSequence(seed).spawn(n)]


def generate_cohort(
    expert_profile: BehaviorProfile,
    nonexpert_profile: BehaviorProfile,
    spec: SynthSpec,
    config: RunnableConfig | None = None,
) -> List[Session]:
    """Experts E01.. followed by non-experts N01..; per-session seeds are spawned from spec.seed."""
    plan = [(Label.EXPERT, f"E{i:02d}", expert_profile) for i in range(1, spec.n_experts + 1)]
    plan += [(Label.NON_EXPERT, f"N{i:02d}", nonexpert_profile) for i in range(1, spec.n_nonexperts + 1)]
    seeds = cohort_seeds(spec.seed, len(plan))

    def one(item: tuple) -> Session:
        (label, pid, profile), seed = item
        return generate_session(
            profile, label, pid, spec.images_per_session, spec.sampling_rate, seed, spec.dropout_rate
        )

    sessions = RunnableLambda(one).batch(list(zip(plan, seeds)), config)
    logger.info("✅ Generated %d experts and %d non-experts", spec.n_experts, spec.n_nonexperts)
    return sessions
