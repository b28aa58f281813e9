from .generator import ProfileSegment, generate_cohort, generate_session, simulate_session
from .profiles import BehaviorProfile, SynthSpec

__all__ = ["BehaviorProfile", "ProfileSegment", "SynthSpec", "generate_cohort", "generate_session", "simulate_session"]
