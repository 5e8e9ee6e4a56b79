"""
Utility functions for g0dist.
"""

from __future__ import annotations

import hashlib
import logging
import os
import secrets
import tempfile
from pathlib import Path

import numpy as np

from .exceptions import ConfigurationError

logger = logging.getLogger(__name__)


def find_project_root(start_path: Path | None = None) -> Path | None:
    """Find the project root by looking for pyproject.toml."""
    if start_path is None:
        start_path = Path.cwd()

    current = start_path.resolve()

    for parent in [current] + list(current.parents):
        if (parent / "pyproject.toml").exists():
            return parent

    return None


def ensure_directory(path: Path) -> None:
    """Ensure a directory exists, creating it if necessary."""
    try:
        path.mkdir(parents=True, exist_ok=True)
        logger.debug(f"Created directory: {path}")
    except OSError as e:
        raise ConfigurationError(f"Failed to create directory {path}: {e}")


def safe_remove_file(path: Path) -> bool:
    """Safely remove a file, returning True if successful."""
    try:
        if path.exists():
            path.unlink()
            logger.debug(f"Removed file: {path}")
            return True
        return False
    except OSError as e:
        logger.warning(f"Failed to remove file {path}: {e}")
        return False


def atomic_write_bytes(path: Path, data: bytes) -> Path:
    """Write ``data`` to ``path`` through a temporary file and an atomic rename."""
    path = Path(path)
    ensure_directory(path.parent.resolve())
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent.resolve())
    tmp_path = Path(tmp_name)
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp_path, path)
    except OSError as e:
        safe_remove_file(tmp_path)
        raise ConfigurationError(f"Failed to write {path}: {e}")
    logger.debug(f"Wrote {len(data)} bytes to {path}")
    return path


def atomic_write_text(path: Path, text: str) -> Path:
    """Text variant of :func:`atomic_write_bytes` (UTF-8)."""
    return atomic_write_bytes(path, text.encode("utf-8"))


def file_digest(path: Path) -> str:
    """SHA-256 hex digest of a file."""
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def fresh_seed() -> int:
    """Draw a seed from OS entropy, for runs started without one."""
    return secrets.randbits(63)


def derive_rng(seed: int, *keys: int) -> np.random.Generator:
    """Independent generator for the stream addressed by ``(seed, *keys)``.

    Streams for different key tuples are statistically independent, and the
    stream for a given tuple never depends on which other streams were drawn,
    so parallel replicates reproduce regardless of scheduling.
    """
    if seed < 0:
        raise ConfigurationError(f"Seeds must be non-negative, got {seed}")
    sequence = np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in keys))
    return np.random.default_rng(sequence)
