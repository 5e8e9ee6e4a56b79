"""
Settings for g0dist, read from pyproject.toml, g0dist.toml and the environment.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any

import tomlkit

from .exceptions import ConfigurationError
from .utils import find_project_root

logger = logging.getLogger(__name__)

CONFIG_FILENAME = "g0dist.toml"
THREADS_ENV = "G0DIST_THREADS"

_CHOICES = {
    "metric_alpha": ("pooled-mean", "first", "second"),
    "gradient": ("central", "analytic"),
    "on_fit_failure": ("skip", "retry", "abort"),
}


def default_threads() -> int:
    return os.cpu_count() or 1


@dataclass(frozen=True)
class Settings:
    """Tunables shared by the estimators, tests and harnesses."""

    threads: int = 0
    metric_alpha: str = "pooled-mean"
    gradient: str = "central"
    max_iter: int = 500
    gtol: float = 1e-8
    perm: int = 1000
    eta: float = 0.05
    on_fit_failure: str = "skip"
    quadrature_tol: float = 1e-10

    def __post_init__(self) -> None:
        for key, choices in _CHOICES.items():
            value = getattr(self, key)
            if value not in choices:
                raise ConfigurationError(
                    f"Invalid {key} '{value}'. Valid values are: {', '.join(choices)}"
                )
        if self.threads < 0:
            raise ConfigurationError(f"threads must be >= 0, got {self.threads}")
        if self.max_iter < 1:
            raise ConfigurationError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.perm < 1:
            raise ConfigurationError(f"perm must be >= 1, got {self.perm}")
        if not 0 < self.eta < 1:
            raise ConfigurationError(f"eta must lie in (0, 1), got {self.eta}")
        if self.gtol <= 0 or self.quadrature_tol <= 0:
            raise ConfigurationError("Tolerances must be positive")

    @property
    def worker_count(self) -> int:
        """Threads to use; 0 means all available cores."""
        return self.threads or default_threads()

    def merged(self, overrides: dict[str, Any]) -> Settings:
        """Return a copy with the non-None entries of ``overrides`` applied."""
        changes = {k: v for k, v in overrides.items() if v is not None}
        _check_keys(changes, "overrides")
        return replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def _check_keys(table: dict[str, Any], source: str) -> None:
    known = {f.name for f in fields(Settings)}
    unknown = sorted(set(table) - known)
    if unknown:
        raise ConfigurationError(
            f"Unknown settings in {source}: {unknown}. Valid keys are: {', '.join(sorted(known))}"
        )


def _read_toml(path: Path) -> dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = tomlkit.parse(f.read())
    except FileNotFoundError:
        raise ConfigurationError(f"Settings file not found: {path}")
    except Exception as e:
        raise ConfigurationError(f"Error reading {path}: {e}")
    # tomlkit containers to plain Python types
    return json.loads(json.dumps(dict(raw)))


def _settings_from_pyproject(path: Path) -> dict[str, Any]:
    config = _read_toml(path)
    table = config.get("tool", {}).get("g0dist", {})
    _check_keys(table, str(path))
    return table


def _settings_from_file(path: Path) -> dict[str, Any]:
    table = _read_toml(path)
    _check_keys(table, str(path))
    return table


def load_settings(
    config_path: Path | None = None,
    start_dir: Path | None = None,
    environ: dict[str, str] | None = None,
) -> tuple[Settings, list[str]]:
    """Resolve settings from defaults, project files and the environment.

    Returns the settings and the list of sources that contributed, in order.
    """
    values: dict[str, Any] = {}
    sources = ["defaults"]
    env = os.environ if environ is None else environ

    root = find_project_root(start_dir)
    if root is not None:
        pyproject = root / "pyproject.toml"
        table = _settings_from_pyproject(pyproject)
        if table:
            values.update(table)
            sources.append(str(pyproject))

    local = config_path
    if local is None:
        candidate = (root or Path(start_dir or Path.cwd())) / CONFIG_FILENAME
        local = candidate if candidate.exists() else None
    if local is not None:
        values.update(_settings_from_file(Path(local)))
        sources.append(str(local))

    if env.get(THREADS_ENV):
        try:
            values["threads"] = int(env[THREADS_ENV])
        except ValueError:
            raise ConfigurationError(f"{THREADS_ENV} must be an integer, got '{env[THREADS_ENV]}'")
        sources.append(f"${THREADS_ENV}")

    try:
        settings = Settings(**values)
    except TypeError as e:
        raise ConfigurationError(f"Invalid settings: {e}")
    logger.debug(f"Settings resolved from {sources}: {settings}")
    return settings, sources
