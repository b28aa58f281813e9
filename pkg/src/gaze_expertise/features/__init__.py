from .export import export_dataset, features_frame, load_feature_matrix, write_feature_matrix
from .extract import WindowFeatureExtractor, WindowFeatures, extract_window_features, sequence_length
from .heatmap import HeatmapParams, render_heatmap, save_heatmap
from .images import ImageStatistics, image_statistics
from .metrics import (
    average_euclidean_distance,
    average_fixation_duration,
    fixation_count,
    gaze_relational_index,
    minmax_rescale,
)
from .normalize import FeatureStats, apply_normalizer, fit_normalizer, normalize_all
from .resample import resample_gaze

__all__ = [
    "FeatureStats",
    "HeatmapParams",
    "ImageStatistics",
    "WindowFeatureExtractor",
    "WindowFeatures",
    "apply_normalizer",
    "average_euclidean_distance",
    "average_fixation_duration",
    "export_dataset",
    "extract_window_features",
    "features_frame",
    "fit_normalizer",
    "fixation_count",
    "gaze_relational_index",
    "image_statistics",
    "load_feature_matrix",
    "minmax_rescale",
    "normalize_all",
    "render_heatmap",
    "resample_gaze",
    "save_heatmap",
    "sequence_length",
    "write_feature_matrix",
]
