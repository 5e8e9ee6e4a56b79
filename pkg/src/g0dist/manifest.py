"""
Run manifests: what produced an output file, with which seed and inputs.
"""

from __future__ import annotations

import json
import logging
import platform
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from importlib import metadata
from pathlib import Path
from typing import Any

from . import __version__
from .utils import atomic_write_text, file_digest

logger = logging.getLogger(__name__)

TRACKED_PACKAGES = ("numpy", "scipy", "pandas", "click", "rich", "tomlkit")


def package_versions() -> dict[str, str]:
    versions = {"g0dist": __version__, "python": platform.python_version()}
    for name in TRACKED_PACKAGES:
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = "not installed"
    return versions


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunManifest:
    """Provenance record written next to every output."""

    command: str
    seed: int | None = None
    argv: list[str] = field(default_factory=lambda: list(sys.argv))
    settings: dict[str, Any] = field(default_factory=dict)
    parameters: dict[str, Any] = field(default_factory=dict)
    inputs: dict[str, str] = field(default_factory=dict)
    outputs: list[str] = field(default_factory=list)
    versions: dict[str, str] = field(default_factory=package_versions)
    started: str = field(default_factory=_now)
    finished: str | None = None

    def add_input(self, path: Path) -> None:
        self.inputs[str(path)] = file_digest(Path(path))

    def add_outputs(self, paths: list[Path]) -> None:
        self.outputs.extend(str(p) for p in paths)

    def finish(self) -> RunManifest:
        self.finished = _now()
        return self

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def write(self, path: Path) -> Path:
        if self.finished is None:
            self.finish()
        written = atomic_write_text(path, json.dumps(self.to_dict(), indent=2, default=str) + "\n")
        logger.debug(f"Wrote manifest {written}")
        return written


def manifest_path(output: Path) -> Path:
    """``manifest.json`` inside a report directory, ``<output>.manifest.json`` otherwise."""
    output = Path(output)
    if output.is_dir():
        return output / "manifest.json"
    return output.with_name(output.name + ".manifest.json")
