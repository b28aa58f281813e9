# File: src/gaze_expertise/features/heatmap.py

import logging
from pathlib import Path

import numpy as np
from PIL import Image
from pydantic import BaseModel, Field

from ..core.errors import ParameterError
from ..core.schemas import GazeTrack

logger = logging.getLogger(__name__)

_CHUNK = 4096


class HeatmapParams(BaseModel):
    width: int = Field(default=320, ge=1, description="Grid width in pixels.")
    height: int = Field(default=240, ge=1, description="Grid height in pixels.")
    kernel_sigma_px: float = Field(default=12.0, gt=0.0, description="Std of the isotropic Gaussian kernel.")


def _axis_kernel(coords: np.ndarray, size: int, sigma: float) -> np.ndarray:
    pixels = np.arange(size, dtype=np.float64)
    centers = coords * (size - 1)
    return np.exp(-((pixels[None, :] - centers[:, None]) ** 2) / (2.0 * sigma * sigma))


def render_heatmap(gaze: GazeTrack, width: int = 320, height: int = 240, kernel_sigma_px: float = 12.0) -> np.ndarray:
    """
    Accumulates one Gaussian per gaze sample at (x * (width-1), y * (height-1)) and
    rescales so the peak is 1. Returns a (height, width) grid; all zeros when empty.
    """
    if width < 1 or height < 1:
        raise ParameterError(f"heatmap size must be at least 1x1, got {width}x{height}")
    grid = np.zeros((height, width), dtype=np.float64)
    if len(gaze) == 0:
        return grid

    # the kernel is separable, so the sum over samples is Ky^T @ Kx
    for lo in range(0, len(gaze), _CHUNK):
        kx = _axis_kernel(gaze.x[lo:lo + _CHUNK], width, kernel_sigma_px)
        ky = _axis_kernel(gaze.y[lo:lo + _CHUNK], height, kernel_sigma_px)
        grid += ky.T @ kx

    peak = grid.max()
    if peak > 0:
        grid /= peak
    return grid


def normalize_heatmap(grid: np.ndarray) -> np.ndarray:
    peak = float(np.max(grid)) if grid.size else 0.0
    return grid / peak if peak > 0 else np.zeros_like(grid)


def heatmap_to_image(grid: np.ndarray) -> Image.Image:
    return Image.fromarray(np.round(np.clip(grid, 0.0, 1.0) * 255.0).astype(np.uint8))


def save_heatmap(grid: np.ndarray, path: Path) -> Path:
    """Writes an 8-bit grayscale PNG."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    heatmap_to_image(grid).save(path, format="PNG")
    logger.debug("Heatmap written to %s", path)
    return path
