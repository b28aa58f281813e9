from .idt import FixationDetector, IdtParams, detect_fixations, fixations_frame

__all__ = ["FixationDetector", "IdtParams", "detect_fixations", "fixations_frame"]
