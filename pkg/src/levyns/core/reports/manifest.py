"""Run manifests: provenance of every file a run produced."""
from __future__ import annotations

import json
import logging
import os
import tempfile
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Optional, Union

from levyns.core.constants import TOOL_NAME, TOOL_VERSION

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunManifest:
    """Written once at run end; ``complete`` is false when the run stopped early."""
    command: str
    config_hash: str
    seed: int
    started: str = field(default_factory=_now)
    finished: Optional[str] = None
    files: list[str] = field(default_factory=list)
    flagged_count: int = 0
    complete: bool = False
    h_theta: Optional[float] = None
    warnings: list[str] = field(default_factory=list)
    error: Optional[str] = None
    tool: str = TOOL_NAME
    tool_version: str = TOOL_VERSION

    def add_file(self, path: Union[str, Path], out_dir: Union[str, Path]) -> None:
        name = os.path.relpath(Path(path), Path(out_dir))
        if name not in self.files:
            self.files.append(name)

    def to_dict(self) -> dict[str, Any]:
        return {
            "tool": self.tool,
            "tool_version": self.tool_version,
            "command": self.command,
            "config_hash": self.config_hash,
            "seed": self.seed,
            "started": self.started,
            "finished": self.finished,
            "files": sorted(self.files),
            "flagged_count": self.flagged_count,
            "complete": self.complete,
            "h_theta": self.h_theta,
            "warnings": list(self.warnings),
            "error": self.error,
        }


def write_manifest(manifest: RunManifest, out_dir: Union[str, Path]) -> Path:
    """Atomic write: temp file in the same directory, then os.replace."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if manifest.finished is None:
        manifest.finished = _now()
    target = out_dir / MANIFEST_NAME
    fd, tmp = tempfile.mkstemp(prefix=".manifest-", suffix=".json", dir=out_dir)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            json.dump(manifest.to_dict(), handle, indent=2, allow_nan=False, default=str)
            handle.write("\n")
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.info(f"Wrote manifest {target} (complete={manifest.complete}, {len(manifest.files)} files)")
    return target


def read_manifest(out_dir: Union[str, Path]) -> dict[str, Any]:
    with (Path(out_dir) / MANIFEST_NAME).open(encoding="utf-8") as handle:
        return json.load(handle)
