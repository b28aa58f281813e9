from .groups import FeatureComparison, GroupReport, compare_groups, split_by_label
from .mann_whitney import UTestResult, mann_whitney_u

__all__ = ["FeatureComparison", "GroupReport", "UTestResult", "compare_groups", "mann_whitney_u", "split_by_label"]
