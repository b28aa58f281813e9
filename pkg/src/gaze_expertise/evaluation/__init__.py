from .roc import RocCurve, auroc, mean_roc, roc_curve
from .splits import SplitPlan, make_split

__all__ = ["RocCurve", "SplitPlan", "auroc", "make_split", "mean_roc", "roc_curve"]
