"""
The G0 distribution for intensity data: density, moments, unit-mean scaling and sampling.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
from numpy.typing import ArrayLike, NDArray
from scipy import integrate
from scipy.special import gammaln

from .exceptions import DataFormatError, DivergenceError, DomainError
from .utils import atomic_write_text, derive_rng

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class G0Params:
    """Parameters of a G0 law: texture ``alpha``, scale ``gamma`` and number of ``looks``."""

    alpha: float
    gamma: float
    looks: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and self.alpha < 0):
            raise DomainError(f"Texture alpha must be negative, got {self.alpha}")
        if not (math.isfinite(self.gamma) and self.gamma > 0):
            raise DomainError(f"Scale gamma must be positive, got {self.gamma}")
        if not (math.isfinite(self.looks) and self.looks >= 1):
            raise DomainError(f"Number of looks must be >= 1, got {self.looks}")

    @classmethod
    def unit_mean(cls, alpha: float, looks: float = 1.0) -> G0Params:
        """Parameters with gamma chosen so that E(Z) = 1."""
        return cls(alpha=alpha, gamma=unit_mean_gamma(alpha), looks=looks)

    def to_dict(self) -> dict[str, float]:
        return {"alpha": self.alpha, "gamma": self.gamma, "looks": self.looks}


@dataclass(frozen=True, eq=False)
class Sample:
    """An ordered collection of positive intensities."""

    values: NDArray[np.float64]
    label: str | None = None
    metadata: dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if values.size < 1:
            raise DomainError("A sample needs at least one observation")
        if not np.all(np.isfinite(values)) or np.any(values <= 0):
            raise DomainError("Sample values must be finite and strictly positive")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return int(self.values.size)

    def scaled(self, factor: float) -> Sample:
        """Return the sample multiplied by ``factor`` (> 0)."""
        if factor <= 0:
            raise DomainError(f"Scale factor must be positive, got {factor}")
        return Sample(self.values * factor, label=self.label, metadata=dict(self.metadata))

    @property
    def mean(self) -> float:
        return float(np.mean(self.values))


def as_values(z: Sample | ArrayLike) -> NDArray[np.float64]:
    """Observations of ``z`` as a validated 1-D float array."""
    if isinstance(z, Sample):
        return z.values
    return Sample(np.asarray(z, dtype=np.float64)).values


def _log_norm(params: G0Params) -> float:
    a, g, L = params.alpha, params.gamma, params.looks
    return float(
        L * math.log(L) + gammaln(L - a) - a * math.log(g) - gammaln(-a) - gammaln(L)
    )


def log_pdf(params: G0Params, z: ArrayLike) -> NDArray[np.float64] | float:
    """Natural log of the G0 density, computed through log-gamma."""
    arr = np.asarray(z, dtype=np.float64)
    if np.any(~(arr > 0)):
        raise DomainError("The G0 density is defined for z > 0 only")
    a, g, L = params.alpha, params.gamma, params.looks
    out = _log_norm(params) + (L - 1.0) * np.log(arr) - (L - a) * np.log(g + L * arr)
    return float(out) if out.ndim == 0 else out


def pdf(params: G0Params, z: ArrayLike) -> NDArray[np.float64] | float:
    """G0 density; may underflow to 0.0 in deep tails (use :func:`log_pdf` for likelihoods)."""
    out = np.exp(log_pdf(params, z))
    return float(out) if np.ndim(out) == 0 else out


def cdf(params: G0Params, z: float) -> float:
    """Distribution function by adaptive quadrature of the density."""
    if z <= 0:
        return 0.0
    # split at the scale so quad sees the peak
    knot = min(z, params.gamma / params.looks)
    head, _ = integrate.quad(lambda t: pdf(params, t), 0.0, knot, limit=200)
    tail = 0.0
    if z > knot:
        tail, _ = integrate.quad(lambda t: pdf(params, t), knot, z, limit=200)
    return min(1.0, head + tail)


def moment(params: G0Params, r: float) -> float:
    """The r-th order moment E(Z^r); exists only for r < -alpha."""
    a, g, L = params.alpha, params.gamma, params.looks
    if r >= -a:
        raise DivergenceError(
            f"Moment of order {r} diverges for alpha={a} (requires r < {-a})"
        )
    if L + r <= 0:
        raise DomainError(f"Moment of order {r} is not defined for L={L}")
    log_m = (
        r * math.log(g / L)
        + gammaln(-a - r)
        - gammaln(-a)
        + gammaln(L + r)
        - gammaln(L)
    )
    return math.exp(log_m)


def unit_mean_gamma(alpha: float) -> float:
    """Scale giving unit mean: gamma* = -alpha - 1 (mean is free of L)."""
    if not alpha < -1:
        raise DomainError(f"A unit-mean scale requires alpha < -1, got {alpha}")
    return -alpha - 1.0


def draw(params: G0Params, n: int, rng: np.random.Generator) -> NDArray[np.float64]:
    """``n`` G0 variates as the ratio of Gamma(L, rate L) speckle and Gamma(-alpha, rate gamma)."""
    speckle = rng.gamma(shape=params.looks, scale=1.0 / params.looks, size=n)
    backscatter = rng.gamma(shape=-params.alpha, scale=1.0 / params.gamma, size=n)
    return speckle / backscatter


def sample(params: G0Params, n: int, seed: int, label: str | None = None) -> Sample:
    """Draw ``n`` i.i.d. observations; deterministic given ``seed``."""
    if n < 1:
        raise DomainError(f"Sample size must be >= 1, got {n}")
    values = draw(params, n, derive_rng(seed))
    return Sample(
        values,
        label=label,
        metadata={"params": params.to_dict(), "seed": seed, "n": n},
    )


def density_grid(
    alphas: list[float], z: ArrayLike, looks: float = 1.0
) -> dict[str, NDArray[np.float64]]:
    """Unit-mean densities on a grid; ``-inf`` selects the Gamma(L, L) limit law."""
    grid = np.asarray(z, dtype=np.float64)
    table: dict[str, NDArray[np.float64]] = {"z": grid}
    for a in alphas:
        if math.isinf(a):
            L = looks
            dens = np.exp(L * math.log(L) - gammaln(L) + (L - 1) * np.log(grid) - L * grid)
        else:
            dens = np.asarray(pdf(G0Params.unit_mean(a, looks), grid))
        table[f"alpha={a:g}"] = dens
    return table


# Serialization


def read_sample(path: Path, label: str | None = None) -> Sample:
    """Read a sample from one-value-per-line text or CSV with an optional ``value`` header."""
    path = Path(path)
    try:
        frame = pd.read_csv(
            path, header=None, usecols=[0], dtype=str, comment="#", skip_blank_lines=True
        )
    except pd.errors.EmptyDataError:
        raise DataFormatError(f"Sample file {path} holds no values")
    except (OSError, pd.errors.ParserError) as e:
        raise DataFormatError(f"Could not read sample file {path}: {e}")

    column = frame.iloc[:, 0].str.strip()
    if len(column) and str(column.iloc[0]).lower() == "value":
        column = column.iloc[1:]
    try:
        values = column.astype(np.float64).to_numpy()
    except ValueError as e:
        raise DataFormatError(f"Non-numeric value in {path}: {e}")

    metadata: dict[str, Any] = {}
    sidecar = sidecar_path(path)
    if sidecar.exists():
        try:
            metadata = json.loads(sidecar.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise DataFormatError(f"Invalid sidecar {sidecar}: {e}")

    try:
        return Sample(values, label=label or path.stem, metadata=metadata)
    except DomainError as e:
        raise DataFormatError(f"Invalid sample in {path}: {e}")


def format_sample(z: Sample, fmt: str = "csv") -> str:
    """Render a sample as CSV (with ``value`` header) or as plain one-per-line text."""
    if fmt not in ("csv", "text"):
        raise DataFormatError(f"Unknown sample format '{fmt}'. Available: csv, text")
    frame = pd.DataFrame({"value": z.values})
    return frame.to_csv(index=False, header=fmt == "csv", lineterminator="\n")


def sidecar_path(path: Path) -> Path:
    return Path(path).with_suffix(Path(path).suffix + ".json")


def write_sample(z: Sample, path: Path, fmt: str = "csv") -> list[Path]:
    """Write a sample and its JSON sidecar (params, seed, n); returns the written paths."""
    path = Path(path)
    atomic_write_text(path, format_sample(z, fmt))
    meta = dict(z.metadata)
    meta.setdefault("n", len(z))
    if z.label:
        meta.setdefault("label", z.label)
    sidecar = atomic_write_text(sidecar_path(path), json.dumps(meta, indent=2) + "\n")
    return [path, sidecar]
