# File: src/gaze_expertise/parsers/gaze_csv.py

import csv
import io
import math
from pathlib import Path

import numpy as np
from pydantic import BaseModel, Field

from ..core.errors import EmptyTrackError, ParseError
from ..core.schemas import DEFAULT_SAMPLING_RATE, GazeTrack
from .base import BaseInputParser

GAZE_COLUMNS = ("t", "x", "y", "confidence")
DEFAULT_CONFIDENCE_THRESHOLD = 0.6


class GazeCsvOptions(BaseModel):
    confidence_threshold: float = Field(default=DEFAULT_CONFIDENCE_THRESHOLD, ge=0.0, le=1.0)
    nominal_rate: float = Field(default=DEFAULT_SAMPLING_RATE, gt=0.0)


def parse_gaze_csv(data: bytes, options: GazeCsvOptions | None = None, source: str | None = None) -> GazeTrack:
    """
    Parses a `t,x,y,confidence` CSV into a GazeTrack.

    Rows below the confidence threshold are dropped, x/y are clamped to [0, 1],
    the result is sorted by t and duplicate timestamps keep their first row.
    A header with no rows is an empty track; a file without even a header is an
    EmptyTrackError.
    """
    options = options or GazeCsvOptions()
    try:
        text = data.decode("utf-8-sig")
    except UnicodeDecodeError as e:
        raise ParseError(f"not valid UTF-8: {e}", source=source) from e

    rows = list(csv.reader(io.StringIO(text)))
    # ignore blank lines but keep line numbers aligned with the file
    numbered = [(n, row) for n, row in enumerate(rows, start=1) if row and any(cell.strip() for cell in row)]
    if not numbered:
        raise EmptyTrackError(f"{source or 'gaze csv'}: file is empty")

    header_line, header = numbered[0]
    if tuple(cell.strip() for cell in header) != GAZE_COLUMNS:
        raise ParseError(f"expected header {','.join(GAZE_COLUMNS)}, got {','.join(header)}", header_line, source)
    body = numbered[1:]
    if not body:
        # an image whose every sample was lost is stored as a bare header
        return GazeTrack.empty(options.nominal_rate)

    values = np.empty((len(body), 4), dtype=np.float64)
    for i, (line, row) in enumerate(body):
        if len(row) != len(GAZE_COLUMNS):
            raise ParseError(f"expected {len(GAZE_COLUMNS)} columns, got {len(row)}", line, source)
        try:
            parsed = [float(cell) for cell in row]
        except ValueError as e:
            raise ParseError(f"non-numeric value in {row!r}", line, source) from e
        if not all(math.isfinite(v) for v in parsed):
            raise ParseError(f"non-finite value in {row!r}", line, source)
        if parsed[0] < 0:
            raise ParseError(f"negative timestamp {parsed[0]}", line, source)
        values[i] = parsed

    raw_count = values.shape[0]
    keep = values[:, 3] >= options.confidence_threshold
    values = values[keep]

    order = np.argsort(values[:, 0], kind="stable")
    values = values[order]
    if values.shape[0] > 1:
        first = np.concatenate(([True], np.diff(values[:, 0]) > 0))
        values = values[first]

    return GazeTrack(
        t=values[:, 0],
        x=np.clip(values[:, 1], 0.0, 1.0),
        y=np.clip(values[:, 2], 0.0, 1.0),
        confidence=values[:, 3],
        nominal_rate=options.nominal_rate,
        raw_count=raw_count,
        dropped_count=int(raw_count - int(keep.sum())),
    )


def gaze_csv_bytes(track: GazeTrack) -> bytes:
    """Serializes a track with shortest round-trip float formatting."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(GAZE_COLUMNS)
    for t, x, y, c in zip(track.t, track.x, track.y, track.confidence):
        writer.writerow((repr(float(t)), repr(float(x)), repr(float(y)), repr(float(c))))
    return buffer.getvalue().encode("utf-8")


def write_gaze_csv(track: GazeTrack, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(gaze_csv_bytes(track))
    return path


class GazeCsvParser(BaseInputParser[GazeTrack]):
    """Runnable wrapper around `parse_gaze_csv`."""

    def __init__(self, options: GazeCsvOptions | None = None):
        self.options = options or GazeCsvOptions()

    def parse(self, data: bytes, source: str | None = None) -> GazeTrack:
        return parse_gaze_csv(data, self.options, source=source)
