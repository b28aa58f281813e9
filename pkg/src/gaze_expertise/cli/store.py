# File: src/gaze_expertise/cli/store.py

"""On-disk layout of a run: session store, resolved config and run metadata."""

import json
import logging
import sys
from datetime import datetime, timezone
from importlib import metadata
from pathlib import Path
from typing import Any, Dict, List

from pydantic import BaseModel

from ..core.errors import ParameterError
from ..core.schemas import Session
from ..parsers.gaze_csv import GazeCsvOptions
from ..parsers.manifest import load_session, write_session

logger = logging.getLogger(__name__)

SESSIONS_DIR = "sessions"
RESOLVED_CONFIG = "resolved_config.json"
RUN_METADATA = "run_metadata.json"
_VERSIONED = ("gaze-expertise", "numpy", "scipy", "pandas", "pydantic", "matplotlib", "pillow")


def dump_json(payload: Any, path: Path) -> Path:
    """Deterministic JSON: sorted keys, two-space indent, trailing newline."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(payload, BaseModel):
        payload = payload.model_dump(mode="json")
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _versions() -> Dict[str, str]:
    found = {}
    for name in _VERSIONED:
        try:
            found[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            found[name] = "unknown"
    return found


def write_run_record(out: Path, config: BaseModel, command: str, argv: List[str], started: datetime) -> None:
    """`resolved_config.json` holds only the config; timestamps go to `run_metadata.json`."""
    dump_json(config, Path(out) / RESOLVED_CONFIG)
    dump_json(
        {
            "command": command,
            "argv": argv,
            "started_at": started.isoformat(),
            "finished_at": datetime.now(timezone.utc).isoformat(),
            "python": sys.version.split()[0],
            "versions": _versions(),
        },
        Path(out) / RUN_METADATA,
    )


def manifest_paths(store: Path) -> List[Path]:
    """Manifests of a store directory (or a single manifest file), sorted by name."""
    store = Path(store)
    if store.is_file():
        return [store]
    if not store.is_dir():
        raise ParameterError(f"session store not found: {store}")
    return sorted(p for p in store.glob("*.json") if p.with_suffix("").is_dir())


def load_store(store: Path, options: GazeCsvOptions | None = None) -> List[Session]:
    sessions = [load_session(p, options=options) for p in manifest_paths(store)]
    logger.info("-> Loaded %d sessions from %s", len(sessions), store)
    return sessions


def write_store(sessions: List[Session], store: Path) -> List[Path]:
    return [write_session(s, Path(store)) for s in sessions]
