"""
Random-permutation calibration of two-sample statistics with unknown null laws.

For each replicate k the pooled sample is shuffled with a generator derived
from (seed, k), split into groups of the original sizes m and n, refitted and
the statistic recomputed. The p-value is the share of replicates whose
statistic is at least the observed one, with no +1 correction, so it can be 0.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
from numpy.typing import ArrayLike, NDArray

from .config import Settings
from .exceptions import DomainError, InfeasibleFitError, NumericalError
from .mle import MIN_SAMPLE_SIZE, FeasibilityBox, FitOptions, FitResult, Regime, fit
from .model import Sample, as_values
from .stats import (
    Calibration,
    MetricAlpha,
    Statistic,
    TestOutcome,
    p_value_chi2,
    statistic_value,
)
from .utils import atomic_write_text, derive_rng

logger = logging.getLogger(__name__)


class FitFailurePolicy(str, Enum):
    SKIP = "skip"
    RETRY = "retry"
    ABORT = "abort"


@dataclass(frozen=True)
class PermutationConfig:
    """Settings of one permutation test."""

    perm: int = 1000
    eta: float = 0.05
    seed: int = 0
    kind: Statistic = Statistic.T1
    on_fit_failure: FitFailurePolicy = FitFailurePolicy.SKIP
    metric_alpha: MetricAlpha = MetricAlpha.POOLED_MEAN
    threads: int = 1
    fit_options: FitOptions = field(default_factory=FitOptions)

    def __post_init__(self) -> None:
        if self.perm < 1:
            raise DomainError(f"perm must be >= 1, got {self.perm}")
        if not 0 < self.eta < 1:
            raise DomainError(f"eta must lie in (0, 1), got {self.eta}")
        if self.seed < 0:
            raise DomainError(f"seed must be non-negative, got {self.seed}")
        if self.threads < 1:
            raise DomainError(f"threads must be >= 1, got {self.threads}")
        object.__setattr__(self, "kind", Statistic.parse(self.kind))
        object.__setattr__(self, "on_fit_failure", FitFailurePolicy(self.on_fit_failure))
        object.__setattr__(self, "metric_alpha", MetricAlpha.parse(self.metric_alpha))

    @classmethod
    def from_settings(cls, settings: Settings, seed: int, **overrides: Any) -> PermutationConfig:
        values: dict[str, Any] = {
            "perm": settings.perm,
            "eta": settings.eta,
            "seed": seed,
            "on_fit_failure": settings.on_fit_failure,
            "metric_alpha": settings.metric_alpha,
            "threads": settings.worker_count,
            "fit_options": FitOptions(
                gradient=settings.gradient, max_iter=settings.max_iter, gtol=settings.gtol
            ),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass(frozen=True)
class PermutationResult:
    """Observed statistic, its permutation distribution and the resulting decision."""

    kind: Statistic
    observed: float
    permuted: NDArray[np.float64]
    p_value: float
    rejected: bool
    skipped: int
    eta: float

    @property
    def effective(self) -> int:
        return int(self.permuted.size)

    def to_dict(self, include_permuted: bool = False) -> dict[str, Any]:
        out: dict[str, Any] = {
            "statistic": self.kind.value,
            "observed": _json_float(self.observed),
            "p_value": self.p_value,
            "rejected": self.rejected,
            "eta": self.eta,
            "effective": self.effective,
            "skipped": self.skipped,
        }
        if include_permuted:
            out["permuted"] = [_json_float(v) for v in self.permuted]
        return out

    def permuted_csv(self) -> str:
        frame = pd.DataFrame(
            {"k": np.arange(1, self.effective + 1), self.kind.value: self.permuted}
        )
        return frame.to_csv(index=False, lineterminator="\n")

    def dump_permuted(self, path: Path) -> Path:
        """Write the permuted statistic values to CSV for diagnostics."""
        return atomic_write_text(path, self.permuted_csv())


def _json_float(v: float) -> float | str:
    return float(v) if np.isfinite(v) else "inf"


def split_pooled(
    pooled: NDArray[np.float64], m: int, rng: np.random.Generator
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Uniform shuffle of the pooled sample, then a prefix/suffix split at ``m``."""
    shuffled = rng.permutation(pooled)
    return shuffled[:m], shuffled[m:]


def fit_pair(
    x1: NDArray[np.float64],
    x2: NDArray[np.float64],
    looks: float,
    regime: Regime,
    known: float | None,
    box: FeasibilityBox,
    options: FitOptions,
) -> tuple[FitResult, FitResult]:
    """Fit both groups; raises when either fit fails or leaves the box."""
    f1 = fit(x1, looks, regime, known=known, box=box, options=options)
    f2 = fit(x2, looks, regime, known=known, box=box, options=options)
    if not (f1.feasible and f2.feasible):
        raise InfeasibleFitError("A group's estimates fell outside the feasibility box")
    return f1, f2


def _default_regime(kinds: tuple[Statistic, ...], known: float | None) -> Regime:
    if known is None or any(k.composite for k in kinds):
        return Regime.BOTH
    if all(k is Statistic.T_ALPHA for k in kinds):
        return Regime.ALPHA_ONLY
    if all(k is Statistic.T_GAMMA for k in kinds):
        return Regime.GAMMA_ONLY
    raise DomainError("Cannot mix T_alpha and T_gamma with a known parameter")


def permutation_test_many(
    z1: Sample | ArrayLike,
    z2: Sample | ArrayLike,
    looks: float,
    cfg: PermutationConfig,
    kinds: tuple[Statistic, ...] | None = None,
    regime: Regime | None = None,
    known: float | None = None,
    box: FeasibilityBox | None = None,
) -> dict[Statistic, PermutationResult]:
    """Permutation test for several statistics sharing the same shuffles and refits."""
    x1, x2 = as_values(z1), as_values(z2)
    m, n = x1.size, x2.size
    if m < MIN_SAMPLE_SIZE or n < MIN_SAMPLE_SIZE:
        raise DomainError(f"Both samples need at least {MIN_SAMPLE_SIZE} observations")

    kinds = tuple(Statistic.parse(k) for k in (kinds or (cfg.kind,)))
    regime = regime or _default_regime(kinds, known)
    known_alpha = known if regime is Regime.GAMMA_ONLY else None
    pooled = np.concatenate([x1, x2])
    box = box or FeasibilityBox.for_data(pooled)

    def evaluate(f1: FitResult, f2: FitResult) -> dict[Statistic, float]:
        return {
            k: statistic_value(k, f1, f2, m, n, looks, cfg.metric_alpha, known_alpha)
            for k in kinds
        }

    f1, f2 = fit_pair(x1, x2, looks, regime, known, box, cfg.fit_options)
    observed = evaluate(f1, f2)
    logger.debug(f"Observed statistics: {observed}")

    attempts = 2 if cfg.on_fit_failure is FitFailurePolicy.RETRY else 1

    def replicate(k: int) -> dict[Statistic, float] | None:
        rng = derive_rng(cfg.seed, k)
        for _ in range(attempts):
            g1, g2 = split_pooled(pooled, m, rng)
            try:
                return evaluate(*fit_pair(g1, g2, looks, regime, known, box, cfg.fit_options))
            except NumericalError as e:
                if cfg.on_fit_failure is FitFailurePolicy.ABORT:
                    raise
                logger.debug(f"Permutation {k} failed: {e}")
        return None

    indices = range(1, cfg.perm + 1)
    if cfg.threads == 1:
        replicates = [replicate(k) for k in indices]
    else:
        with ThreadPoolExecutor(max_workers=cfg.threads) as executor:
            replicates = list(executor.map(replicate, indices))

    kept = [r for r in replicates if r is not None]
    skipped = len(replicates) - len(kept)
    if skipped:
        logger.debug(f"Skipped {skipped} of {cfg.perm} permutations after fit failures")

    results: dict[Statistic, PermutationResult] = {}
    for k in kinds:
        permuted = np.array([r[k] for r in kept], dtype=np.float64)
        if permuted.size == 0:
            logger.warning("Every permutation failed; reporting p-value 1")
            p_value = 1.0
        else:
            p_value = float(np.count_nonzero(permuted >= observed[k]) / permuted.size)
        results[k] = PermutationResult(
            kind=k,
            observed=observed[k],
            permuted=permuted,
            p_value=p_value,
            rejected=p_value < cfg.eta,
            skipped=skipped,
            eta=cfg.eta,
        )
    return results


def permutation_test(
    z1: Sample | ArrayLike,
    z2: Sample | ArrayLike,
    looks: float,
    cfg: PermutationConfig,
    regime: Regime | None = None,
    known: float | None = None,
    box: FeasibilityBox | None = None,
) -> PermutationResult:
    """Permutation test of ``cfg.kind``."""
    return permutation_test_many(z1, z2, looks, cfg, (cfg.kind,), regime, known, box)[cfg.kind]


def two_sample_test(
    z1: Sample | ArrayLike,
    z2: Sample | ArrayLike,
    looks: float,
    kind: Statistic | str,
    calibration: Calibration | str | None = None,
    known_alpha: float | None = None,
    known_gamma: float | None = None,
    cfg: PermutationConfig | None = None,
    box: FeasibilityBox | None = None,
) -> tuple[TestOutcome, PermutationResult | None]:
    """Run one statistic with chi-square or permutation calibration.

    T_alpha and T_gamma default to the chi-square reference with one degree of
    freedom; the composite statistics can only be calibrated by permutation.
    """
    kind = Statistic.parse(kind)
    if calibration is None:
        calibration = Calibration.PERMUTATION if kind.composite else Calibration.CHI2
    calibration = Calibration(calibration)
    if kind.composite and calibration is Calibration.CHI2:
        raise DomainError(f"{kind.value} has no asymptotic reference; use permutation calibration")
    if known_alpha is not None and known_gamma is not None:
        raise DomainError("At most one parameter can be known")

    known = known_gamma if known_gamma is not None else known_alpha
    regime = Regime.BOTH
    if kind is Statistic.T_ALPHA and known_gamma is not None:
        regime = Regime.ALPHA_ONLY
    elif kind is Statistic.T_GAMMA and known_alpha is not None:
        regime = Regime.GAMMA_ONLY
    elif known is not None:
        raise DomainError(f"A known parameter does not apply to {kind.value}")

    x1, x2 = as_values(z1), as_values(z2)
    cfg = cfg or PermutationConfig(kind=kind)
    if cfg.kind is not kind:
        cfg = replace(cfg, kind=kind)
    fit_known = known if regime is not Regime.BOTH else None

    if calibration is Calibration.PERMUTATION:
        result = permutation_test(x1, x2, looks, cfg, regime=regime, known=fit_known, box=box)
        outcome = TestOutcome(
            statistic=kind,
            value=result.observed,
            m=x1.size,
            n=x2.size,
            p_value=result.p_value,
            calibration=calibration,
            eta=cfg.eta,
            details={"perm": cfg.perm, "skipped": result.skipped, "seed": cfg.seed},
        )
        return outcome, result

    fit_box = box or FeasibilityBox.for_data(np.concatenate([x1, x2]))
    f1 = fit(x1, looks, regime, known=fit_known, box=fit_box, options=cfg.fit_options)
    f2 = fit(x2, looks, regime, known=fit_known, box=fit_box, options=cfg.fit_options)
    known_metric_alpha = known_alpha if regime is Regime.GAMMA_ONLY else None
    value = statistic_value(kind, f1, f2, x1.size, x2.size, looks, cfg.metric_alpha, known_metric_alpha)
    outcome = TestOutcome(
        statistic=kind,
        value=value,
        m=x1.size,
        n=x2.size,
        p_value=p_value_chi2(value),
        calibration=calibration,
        eta=cfg.eta,
        details={"feasible": f1.feasible and f2.feasible},
    )
    return outcome, None
