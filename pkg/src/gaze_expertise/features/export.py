# File: src/gaze_expertise/features/export.py

import logging
from pathlib import Path
from typing import List

import numpy as np
import pandas as pd

from ..core.errors import ParseError
from ..core.schemas import Fixation, Label, Session
from ..parsers.manifest import split_track_by_events, write_session
from ..windowing.slicing import PhaseTag
from .extract import WindowFeatures
from .heatmap import HeatmapParams, render_heatmap, save_heatmap
from .images import ImageStatistics, image_statistics

logger = logging.getLogger(__name__)

FEATURE_COLUMNS = ["participant_id", "window_index", "afd_ms", "fc", "aed", "label", "phase_tag"]
IMAGE_COLUMNS = [
    "participant_id", "label", "image_id", "ground_truth", "initial_decision", "final_decision",
    "afd_ms", "fc", "aed", "gri", "gri_normalized",
]


def size_tag(size: float) -> str:
    return f"{size:g}s"


def features_frame(features: List[WindowFeatures]) -> pd.DataFrame:
    rows = [
        {
            "participant_id": f.participant_id,
            "window_index": f.window_index,
            "afd_ms": f.afd_ms,
            "fc": int(round(f.fc)) if not f.normalized else f.fc,
            "aed": f.aed,
            "label": f.label.value,
            "phase_tag": f.phase_tag.value,
        }
        for f in features
    ]
    return pd.DataFrame(rows, columns=FEATURE_COLUMNS)


def images_frame(stats: List[ImageStatistics]) -> pd.DataFrame:
    rows = [s.model_dump(mode="json", include=set(IMAGE_COLUMNS)) for s in stats]
    return pd.DataFrame(rows, columns=IMAGE_COLUMNS)


def write_feature_matrix(features: List[WindowFeatures], out_dir: Path, size: float) -> tuple[Path, Path]:
    """
    Writes `features_<size>s.csv` (scalar table) and `features_<size>s.npz` (everything,
    gaze sequences included) into `out_dir`.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"features_{size_tag(size)}.csv"
    npz_path = out_dir / f"features_{size_tag(size)}.npz"
    features_frame(features).to_csv(csv_path, index=False, lineterminator="\n")

    length = features[0].length if features else 0
    np.savez(
        npz_path,
        size=np.float64(size),
        gaze=np.stack([f.gaze_seq for f in features]) if features else np.zeros((0, 2, length)),
        scalars=np.array([f.scalars() for f in features], dtype=np.float64).reshape(-1, 3),
        participant_id=np.array([f.participant_id for f in features], dtype=str),
        window_index=np.array([f.window_index for f in features], dtype=np.int64),
        start=np.array([f.start for f in features], dtype=np.float64),
        label=np.array([f.label.value for f in features], dtype=str),
        phase_tag=np.array([f.phase_tag.value for f in features], dtype=str),
        empty_gaze=np.array([f.empty_gaze for f in features], dtype=bool),
    )
    logger.info("-> Wrote %d windows to %s", len(features), csv_path.name)
    return csv_path, npz_path


def load_feature_matrix(path: Path) -> List[WindowFeatures]:
    path = Path(path)
    try:
        with np.load(path, allow_pickle=False) as data:
            size = float(data["size"])
            gaze = data["gaze"]
            scalars = data["scalars"]
            return [
                WindowFeatures(
                    participant_id=str(data["participant_id"][i]),
                    window_index=int(data["window_index"][i]),
                    start=float(data["start"][i]),
                    size=size,
                    gaze_seq=gaze[i],
                    afd_ms=float(scalars[i, 0]),
                    fc=float(scalars[i, 1]),
                    aed=float(scalars[i, 2]),
                    label=Label(str(data["label"][i])),
                    phase_tag=PhaseTag(str(data["phase_tag"][i])),
                    empty_gaze=bool(data["empty_gaze"][i]),
                )
                for i in range(len(scalars))
            ]
    except (OSError, KeyError, ValueError) as e:
        raise ParseError(f"cannot read feature matrix: {e}", source=path.name) from e


def export_dataset(
    session: Session,
    fixations: List[Fixation],
    out_dir: Path,
    heatmap: HeatmapParams | None = None,
) -> Path:
    """
    Writes the session in the manifest layout, each entry extended with its per-image
    statistics and a pointer to an 8-bit heatmap PNG rendered from that image's gaze.
    """
    heatmap = heatmap or HeatmapParams()
    out_dir = Path(out_dir)
    stats = image_statistics(session, fixations)
    extra = []
    for i, (stat, piece) in enumerate(zip(stats, split_track_by_events(session)), start=1):
        name = f"heatmap_{i}.png"
        grid = render_heatmap(piece, heatmap.width, heatmap.height, heatmap.kernel_sigma_px)
        save_heatmap(grid, out_dir / session.participant_id / name)
        extra.append({**stat.dataset_fields(), "heatmap": name})
    manifest = write_session(session, out_dir, extra_fields=extra)
    logger.info("✅ Exported %s (%d images) to %s", session.participant_id, len(stats), manifest)
    return manifest
