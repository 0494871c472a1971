"""Append-only run log."""
from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import __version__


def default_runs_path() -> Path:
    env = os.environ.get("CARMICHAEL_RUNS_FILE")
    if env:
        return Path(env)
    base = Path(os.environ.get("XDG_DATA_HOME", Path.home() / ".local" / "share"))
    return base / "carmichael" / "runs.jsonl"


def now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunRecord:
    command: str
    parameters: dict
    started: str
    finished: str = ""
    summary: dict = field(default_factory=dict)
    version: str = __version__

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "RunRecord":
        return cls(**json.loads(line))


def append_run(record: RunRecord, path: Path | None = None) -> Path:
    path = Path(path) if path is not None else default_runs_path()
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(record.to_json() + "\n")
    return path


def read_runs(path: Path | None = None) -> list[RunRecord]:
    path = Path(path) if path is not None else default_runs_path()
    if not path.exists():
        return []
    with open(path, encoding="utf-8") as fh:
        return [RunRecord.from_json(line) for line in fh if line.strip()]
