from .slicing import PhaseTag, WindowData, phase_tag_for, slice_window
from .spans import (
    DEFAULT_WINDOW_SIZES,
    WindowSpan,
    filter_initial_phase,
    generate_windows,
    inventory_frame,
)

__all__ = [
    "DEFAULT_WINDOW_SIZES",
    "PhaseTag",
    "WindowData",
    "WindowSpan",
    "filter_initial_phase",
    "generate_windows",
    "inventory_frame",
    "phase_tag_for",
    "slice_window",
]
