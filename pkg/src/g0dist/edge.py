"""
Scan-line edge detection on intensity strips.

Each row is split at every k in [3, n-3]; both halves get two-parameter fits
and the permutation p-value of the chosen statistic. The detected column is
the split with the smallest p-value, ties going to the smallest k.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
from numpy.typing import ArrayLike, NDArray
from rich.progress import BarColumn, Progress, SpinnerColumn, TextColumn

from .exceptions import DomainError, NumericalError, RowDegenerateError
from .mle import MIN_SAMPLE_SIZE, FeasibilityBox, Regime
from .model import G0Params, draw
from .perm import FitFailurePolicy, PermutationConfig, permutation_test
from .stats import Statistic
from .utils import atomic_write_text, derive_rng

logger = logging.getLogger(__name__)

MIN_COLS = 2 * MIN_SAMPLE_SIZE + 1

SPLIT_OK = "ok"
SPLIT_FAILED = "failed"


@dataclass(frozen=True, eq=False)
class ImageStrip:
    """A rows x cols intensity raster with its number of looks."""

    pixels: NDArray[np.float64]
    looks: float = 1.0

    def __post_init__(self) -> None:
        pixels = np.array(self.pixels, dtype=np.float64)
        if pixels.ndim != 2:
            raise DomainError(f"An image strip is two-dimensional, got shape {pixels.shape}")
        rows, cols = pixels.shape
        if rows < 1:
            raise DomainError("An image strip needs at least one row")
        if cols < MIN_COLS:
            raise DomainError(f"Rows need at least {MIN_COLS} pixels, got {cols}")
        if not np.all(np.isfinite(pixels)) or np.any(pixels < 0):
            raise DomainError("Pixels must be finite and nonnegative")
        if not self.looks >= 1:
            raise DomainError(f"looks must be >= 1, got {self.looks}")
        pixels.setflags(write=False)
        object.__setattr__(self, "pixels", pixels)

    @property
    def rows(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def cols(self) -> int:
        return int(self.pixels.shape[1])


@dataclass(frozen=True)
class Split:
    """Outcome of one candidate split k: S1 = z[:k], S2 = z[k:]."""

    k: int
    p_value: float
    statistic: float
    status: str
    skipped: int = 0


@dataclass(frozen=True)
class RowEdge:
    row: int
    col_hat: int | None
    min_p: float
    profile: list[Split] = field(default_factory=list)

    @property
    def degenerate(self) -> bool:
        return self.col_hat is None


@dataclass(frozen=True)
class EdgeResult:
    kind: Statistic
    cols: int
    rows: list[RowEdge]

    def edges(self) -> pd.DataFrame:
        """One line per row: (row, col_hat, min_p); degenerate rows have no column."""
        return pd.DataFrame(
            {
                "row": [r.row for r in self.rows],
                "col_hat": pd.array([r.col_hat for r in self.rows], dtype="Int64"),
                "min_p": [r.min_p for r in self.rows],
            }
        )

    def profiles(self) -> pd.DataFrame:
        records = [
            {
                "row": r.row,
                "k": s.k,
                "p_value": s.p_value,
                "statistic": s.statistic,
                "status": s.status,
                "skipped": s.skipped,
            }
            for r in self.rows
            for s in r.profile
        ]
        return pd.DataFrame(records, columns=["row", "k", "p_value", "statistic", "status", "skipped"])

    def detection_rate(self, true_col: int, tolerance: int = 5) -> float:
        if not self.rows:
            return math.nan
        hits = sum(
            1 for r in self.rows if r.col_hat is not None and abs(r.col_hat - true_col) <= tolerance
        )
        return hits / len(self.rows)

    def to_dict(self) -> dict[str, Any]:
        return {
            "statistic": self.kind.value,
            "rows": len(self.rows),
            "cols": self.cols,
            "degenerate_rows": sum(r.degenerate for r in self.rows),
        }


def clip_zeros(values: ArrayLike) -> NDArray[np.float64]:
    """Replace zero pixels by half of the smallest positive value in the row."""
    row = np.asarray(values, dtype=np.float64)
    positive = row[row > 0]
    if positive.size == 0:
        raise RowDegenerateError("The row has no positive pixels")
    if positive.size == row.size:
        return row
    return np.where(row > 0, row, 0.5 * positive.min())


def split_seed(seed: int, row: int, k: int) -> int:
    """Seed of the permutation stream of split k in a row."""
    return int(derive_rng(seed, row, k).integers(2**62))


def detect_row(
    values: ArrayLike,
    looks: float,
    cfg: PermutationConfig,
    row: int = 0,
    box: FeasibilityBox | None = None,
) -> RowEdge:
    """Find the split of one row with the smallest permutation p-value.

    Splits whose fits fail or leave the box get p = 1 and are not selected.

    Raises:
        RowDegenerateError: If no split could be fitted.
    """
    z = clip_zeros(values)
    n = z.size
    if n < MIN_COLS:
        raise DomainError(f"Rows need at least {MIN_COLS} pixels, got {n}")
    box = box or FeasibilityBox.for_data(z)

    profile: list[Split] = []
    for k in range(MIN_SAMPLE_SIZE, n - MIN_SAMPLE_SIZE + 1):
        split_cfg = replace(cfg, seed=split_seed(cfg.seed, row, k), threads=1)
        try:
            res = permutation_test(z[:k], z[k:], looks, split_cfg, regime=Regime.BOTH, box=box)
        except NumericalError as e:
            if cfg.on_fit_failure is FitFailurePolicy.ABORT:
                raise
            logger.debug(f"Row {row}, k={k}: {e}")
            profile.append(Split(k=k, p_value=1.0, statistic=math.nan, status=SPLIT_FAILED))
            continue
        profile.append(
            Split(k=k, p_value=res.p_value, statistic=res.observed, status=SPLIT_OK, skipped=res.skipped)
        )

    fitted = [s for s in profile if s.status == SPLIT_OK]
    if not fitted:
        raise RowDegenerateError(f"Every split of row {row} failed to fit")
    # min() keeps the first of equal p-values, and the profile is in increasing k
    best = min(fitted, key=lambda s: s.p_value)
    return RowEdge(row=row, col_hat=best.k, min_p=best.p_value, profile=profile)


def detect_edges(
    strip: ImageStrip,
    kind: Statistic | str,
    cfg: PermutationConfig,
    progress: bool = False,
) -> EdgeResult:
    """Run the row detector over a strip, rows in parallel on ``cfg.threads`` workers."""
    kind = Statistic.parse(kind)
    if not kind.composite:
        logger.debug(f"{kind.value} compares one parameter of two-parameter fits")
    row_cfg = replace(cfg, kind=kind)

    with Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        TextColumn("({task.completed}/{task.total})"),
        disable=not progress,
    ) as bar:
        task = bar.add_task(f"[cyan]Scanning rows with {kind.value}[/cyan]", total=strip.rows)

        def work(i: int) -> RowEdge:
            try:
                edge = detect_row(strip.pixels[i], strip.looks, row_cfg, row=i)
            except RowDegenerateError as e:
                logger.warning(f"Row {i}: {e}")
                edge = RowEdge(row=i, col_hat=None, min_p=math.nan)
            bar.update(task, advance=1)
            return edge

        with ThreadPoolExecutor(max_workers=max(1, cfg.threads)) as executor:
            rows = list(executor.map(work, range(strip.rows)))

    degenerate = sum(r.degenerate for r in rows)
    logger.info(f"Processed {strip.rows} rows ({degenerate} without an edge)")
    return EdgeResult(kind=kind, cols=strip.cols, rows=rows)


def two_region_strip(
    rows: int,
    cols: int,
    edge_col: int,
    left: G0Params,
    right: G0Params,
    seed: int,
) -> ImageStrip:
    """Synthetic strip whose first ``edge_col`` columns follow ``left`` and the rest ``right``."""
    if left.looks != right.looks:
        raise DomainError("Both regions must share the number of looks")
    if not 0 < edge_col < cols:
        raise DomainError(f"edge_col must lie in (0, {cols}), got {edge_col}")
    pixels = np.empty((rows, cols), dtype=np.float64)
    for i in range(rows):
        rng = derive_rng(seed, i)
        pixels[i, :edge_col] = draw(left, edge_col, rng)
        pixels[i, edge_col:] = draw(right, cols - edge_col, rng)
    return ImageStrip(pixels=pixels, looks=left.looks)


def write_edges(result: EdgeResult, path: Path) -> Path:
    return atomic_write_text(path, result.edges().to_csv(index=False))


def write_profiles(result: EdgeResult, path: Path) -> Path:
    return atomic_write_text(path, result.profiles().to_csv(index=False))
