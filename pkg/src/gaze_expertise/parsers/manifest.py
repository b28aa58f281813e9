# File: src/gaze_expertise/parsers/manifest.py

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ..core.errors import ParseError, ResolutionError, SessionValidationError
from ..core.schemas import GazeTrack, ImageEvent, Label, Session
from .base import BaseInputParser
from .gaze_csv import GazeCsvOptions, parse_gaze_csv, write_gaze_csv

logger = logging.getLogger(__name__)


class ManifestEntry(BaseModel):
    """One object of a participant manifest: the recording of a single image."""
    model_config = ConfigDict(extra="forbid")

    participant_id: str = Field(description="Pseudo-identifier randomly assigned to the participant.")
    label: Label = Field(description="Expertise designation: Expert or NonExpert.")
    image_id: str = Field(description="Image source.")
    ground_truth: str = Field(description="Attack-type category of the image.")
    initial_decision: str
    final_decision: str
    raw_gaze_pointer: str = Field(description="File name of the raw gaze CSV inside the gaze directory.")
    shown_at: float
    initial_decision_at: float
    final_decision_at: float
    dropped_samples: Optional[int] = Field(
        default=None, ge=0, description="Samples lost before the CSV was written; counted as dropped on load."
    )
    # Per-image statistics, present in exported datasets only.
    average_fixation_time: Optional[float] = None
    fixation_count: Optional[int] = None
    fixation_times: Optional[List[float]] = None
    average_euclidean_distance: Optional[float] = None
    gri: Optional[float] = None
    gri_normalized: Optional[float] = None
    heatmap: Optional[str] = None

    @field_validator("label", mode="before")
    @classmethod
    def _label(cls, value):
        return Label.parse(value)

    @field_validator("raw_gaze_pointer", mode="before")
    @classmethod
    def _pointer(cls, value):
        # bare sequence numbers refer to seq_<n>.csv
        if isinstance(value, int):
            return f"seq_{value}.csv"
        return value

    def to_event(self) -> ImageEvent:
        return ImageEvent(
            image_id=self.image_id,
            shown_at=self.shown_at,
            initial_decision_at=self.initial_decision_at,
            final_decision_at=self.final_decision_at,
            initial_decision=self.initial_decision,
            final_decision=self.final_decision,
            ground_truth=self.ground_truth,
        )


def _load_entries(manifest: bytes, source: str | None) -> list[ManifestEntry]:
    try:
        payload = json.loads(manifest.decode("utf-8-sig"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ParseError(f"manifest is not valid JSON: {e}", source=source) from e
    if not isinstance(payload, list) or not payload:
        raise ParseError("manifest must be a non-empty JSON array of per-image objects", source=source)
    entries = []
    for index, obj in enumerate(payload):
        try:
            entries.append(ManifestEntry.model_validate(obj))
        except (ValidationError, ValueError) as e:
            raise ParseError(f"manifest object {index} is invalid: {e}", source=source) from e
    return entries


def concatenate_tracks(tracks: List[GazeTrack], nominal_rate: float) -> GazeTrack:
    """Merges per-image tracks into one; duplicate timestamps keep the earliest file's row."""
    if not tracks:
        return GazeTrack.empty(nominal_rate)
    t = np.concatenate([tr.t for tr in tracks])
    cols = np.stack(
        [
            np.concatenate([tr.x for tr in tracks]),
            np.concatenate([tr.y for tr in tracks]),
            np.concatenate([tr.confidence for tr in tracks]),
        ]
    )
    order = np.argsort(t, kind="stable")
    t, cols = t[order], cols[:, order]
    if t.shape[0] > 1:
        first = np.concatenate(([True], np.diff(t) > 0))
        t, cols = t[first], cols[:, first]
    return GazeTrack(
        t=t,
        x=cols[0],
        y=cols[1],
        confidence=cols[2],
        nominal_rate=nominal_rate,
        raw_count=sum(tr.raw_count for tr in tracks),
        dropped_count=sum(tr.dropped_count for tr in tracks),
    )


def parse_session(
    manifest: bytes,
    gaze_dir: Path,
    options: GazeCsvOptions | None = None,
    source: str | None = None,
) -> Session:
    """
    Builds one Session from a participant manifest and the gaze CSVs it points to.
    """
    options = options or GazeCsvOptions()
    gaze_dir = Path(gaze_dir)
    entries = _load_entries(manifest, source)

    participants = {e.participant_id for e in entries}
    labels = {e.label for e in entries}
    if len(participants) != 1 or len(labels) != 1:
        raise SessionValidationError(
            f"manifest mixes participants {sorted(participants)} or labels {sorted(l.value for l in labels)}"
        )

    try:
        events = [e.to_event() for e in entries]
    except ValidationError as e:
        raise SessionValidationError(f"invalid image timing: {e}") from e

    order = sorted(range(len(events)), key=lambda i: events[i].shown_at)
    events = [events[i] for i in order]
    for prev, cur in zip(events, events[1:]):
        if cur.shown_at < prev.final_decision_at:
            raise SessionValidationError(
                f"image {cur.image_id} (shown at {cur.shown_at}) overlaps image {prev.image_id} "
                f"(until {prev.final_decision_at})"
            )

    tracks = []
    for entry in entries:
        path = gaze_dir / entry.raw_gaze_pointer
        if not path.is_file():
            raise ResolutionError(entry.raw_gaze_pointer, str(gaze_dir))
        tracks.append(parse_gaze_csv(path.read_bytes(), options, source=entry.raw_gaze_pointer))

    track = concatenate_tracks(tracks, options.nominal_rate)
    lost = sum(e.dropped_samples or 0 for e in entries)
    if lost:
        track = track.model_copy(
            update={"raw_count": track.raw_count + lost, "dropped_count": track.dropped_count + lost}
        )
    session = Session(
        participant_id=entries[0].participant_id,
        label=entries[0].label,
        track=track,
        events=events,
    )
    logger.debug("-> Parsed session %s: %d images, %d samples", session.participant_id, len(events), len(track))
    return session


def manifest_entries(
    session: Session, pointers: List[str], dropped: List[int] | None = None
) -> List[Dict[str, Any]]:
    dropped = dropped or [0] * len(pointers)
    return [
        ManifestEntry(
            participant_id=session.participant_id,
            label=session.label,
            image_id=event.image_id,
            ground_truth=event.ground_truth,
            initial_decision=event.initial_decision,
            final_decision=event.final_decision,
            raw_gaze_pointer=pointer,
            shown_at=event.shown_at,
            initial_decision_at=event.initial_decision_at,
            final_decision_at=event.final_decision_at,
            dropped_samples=lost or None,
        ).model_dump(mode="json", exclude_none=True)
        for event, pointer, lost in zip(session.events, pointers, dropped)
    ]


def spread_dropped(total: int, pieces: List[GazeTrack]) -> List[int]:
    """Splits a dropped-sample count across pieces in proportion to their length; the remainder goes last."""
    if total == 0 or not pieces:
        return [0] * len(pieces)
    sizes = np.array([len(p) for p in pieces], dtype=np.float64)
    weights = sizes / sizes.sum() if sizes.sum() else np.full(sizes.size, 1.0 / sizes.size)
    counts = np.floor(weights * total).astype(int)
    counts[-1] += total - int(counts.sum())
    return counts.tolist()


def split_track_by_events(session: Session) -> List[GazeTrack]:
    """
    One track per image: samples from the image's onset up to the next onset.
    Samples before the first image go with the first, trailing samples with the last.
    """
    track = session.track
    n = len(session.events)
    pieces = []
    for i in range(n):
        start = -np.inf if i == 0 else session.events[i].shown_at
        end = np.inf if i == n - 1 else session.events[i + 1].shown_at
        piece = track.between(start, end)
        pieces.append(piece)
    return pieces


def write_session(
    session: Session,
    directory: Path,
    extra_fields: List[Dict[str, Any]] | None = None,
) -> Path:
    """
    Writes `<directory>/<participant_id>.json` and one CSV per image under
    `<directory>/<participant_id>/`. Returns the manifest path.

    Only kept samples reach the CSVs, so the track's dropped count is recorded in
    the manifest entries to survive a reload.
    """
    directory = Path(directory)
    gaze_dir = directory / session.participant_id
    pointers = [f"seq_{i}.csv" for i in range(1, len(session.events) + 1)]
    pieces = split_track_by_events(session)
    for piece, pointer in zip(pieces, pointers):
        write_gaze_csv(piece, gaze_dir / pointer)

    entries = manifest_entries(session, pointers, spread_dropped(session.track.dropped_count, pieces))
    if extra_fields is not None:
        for entry, extra in zip(entries, extra_fields):
            entry.update(extra)
    manifest_path = directory / f"{session.participant_id}.json"
    manifest_path.write_text(json.dumps(entries, indent=2) + "\n", encoding="utf-8")
    return manifest_path


def load_session(manifest_path: Path, gaze_dir: Path | None = None, options: GazeCsvOptions | None = None) -> Session:
    """Reads a manifest whose gaze CSVs live in a sibling directory named after it."""
    manifest_path = Path(manifest_path)
    gaze_dir = Path(gaze_dir) if gaze_dir is not None else manifest_path.with_suffix("")
    return parse_session(manifest_path.read_bytes(), gaze_dir, options, source=manifest_path.name)


class SessionParser(BaseInputParser[Session]):
    """Runnable that turns a manifest (path or bytes) into a Session."""

    def __init__(self, gaze_dir: Path | None = None, options: GazeCsvOptions | None = None):
        self.gaze_dir = gaze_dir
        self.options = options or GazeCsvOptions()

    def parse(self, data: bytes, source: str | None = None) -> Session:
        if self.gaze_dir is None:
            raise ParseError("a gaze directory is required to parse manifest bytes", source=source)
        return parse_session(data, self.gaze_dir, self.options, source=source)

    def invoke(self, input, config=None) -> Session:
        if isinstance(input, Path):
            return load_session(input, self.gaze_dir, self.options)
        return super().invoke(input, config)
