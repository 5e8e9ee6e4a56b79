"""
Test statistics built from geodesic distances between fitted G0 models.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from scipy.stats import chi2

from .exceptions import DegenerateStatisticError, DomainError, NumericalError
from .geodesic import dist_alpha, dist_gamma
from .mle import FitResult

logger = logging.getLogger(__name__)

CHI2_95 = 3.841459


class Statistic(str, Enum):
    T_ALPHA = "TAlpha"
    T_GAMMA = "TGamma"
    T1 = "T1"
    T2 = "T2"
    T3 = "T3"

    @classmethod
    def parse(cls, value: str | Statistic) -> Statistic:
        if isinstance(value, Statistic):
            return value
        for member in cls:
            if member.value.lower() == value.strip().lower():
                return member
        available = ", ".join(m.value for m in cls)
        raise DomainError(f"Unknown statistic '{value}'. Available: {available}")

    @property
    def composite(self) -> bool:
        return self in (Statistic.T1, Statistic.T2, Statistic.T3)


class Calibration(str, Enum):
    CHI2 = "Chi2Asymptotic"
    PERMUTATION = "Permutation"


class MetricAlpha(str, Enum):
    """Which texture enters the scale metric of the composite statistics."""

    POOLED_MEAN = "pooled-mean"
    FIRST = "first"
    SECOND = "second"

    @classmethod
    def parse(cls, value: str | MetricAlpha) -> MetricAlpha:
        try:
            return cls(value)
        except ValueError:
            available = ", ".join(m.value for m in cls)
            raise DomainError(f"Unknown metric_alpha '{value}'. Available: {available}")

    def pick(self, alpha1: float, alpha2: float) -> float:
        if self is MetricAlpha.FIRST:
            return alpha1
        if self is MetricAlpha.SECOND:
            return alpha2
        return 0.5 * (alpha1 + alpha2)


@dataclass(frozen=True)
class TestOutcome:
    """A calibrated two-sample test result."""

    __test__ = False  # keep pytest from collecting this class

    statistic: Statistic
    value: float
    m: int
    n: int
    p_value: float
    calibration: Calibration
    eta: float | None = None
    details: dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if not (self.value >= 0):
            raise DomainError(f"Statistic values are nonnegative, got {self.value}")
        if not (0.0 <= self.p_value <= 1.0):
            raise DomainError(f"p-value must lie in [0, 1], got {self.p_value}")

    @property
    def rejected(self) -> bool | None:
        return None if self.eta is None else self.p_value < self.eta

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "statistic": self.statistic.value,
            "value": self.value if math.isfinite(self.value) else "inf",
            "m": self.m,
            "n": self.n,
            "p_value": self.p_value,
            "calibration": self.calibration.value,
        }
        if self.eta is not None:
            out["eta"] = self.eta
            out["rejected"] = self.rejected
        out.update(self.details)
        return out


def _size_factor(m: int, n: int) -> float:
    if m < 1 or n < 1:
        raise DomainError(f"Sample sizes must be positive, got m={m}, n={n}")
    return m * n / (m + n)


def _require_converged(*fits: FitResult) -> None:
    for f in fits:
        if not f.converged:
            raise NumericalError(f"Cannot build a statistic from an unconverged {f.regime.value} fit")


def t_alpha(fit1: FitResult, fit2: FitResult, m: int, n: int, looks: float) -> float:
    """(mn/(m+n)) s(alpha1_hat, alpha2_hat)^2."""
    _require_converged(fit1, fit2)
    return _size_factor(m, n) * dist_alpha(fit1.alpha, fit2.alpha, looks) ** 2


def t_gamma(
    fit1: FitResult, fit2: FitResult, m: int, n: int, alpha_for_metric: float, looks: float
) -> float:
    """(mn/(m+n)) s(gamma1_hat, gamma2_hat)^2 with the metric's texture fixed."""
    _require_converged(fit1, fit2)
    return _size_factor(m, n) * dist_gamma(fit1.gamma, fit2.gamma, alpha_for_metric, looks) ** 2


def p_value_chi2(t: float) -> float:
    """Upper tail of the chi-square law with one degree of freedom."""
    if t < 0:
        raise DomainError(f"Statistic must be nonnegative, got {t}")
    return float(chi2.sf(t, df=1))


def chi2_cutoff(eta: float) -> float:
    """Rejection threshold of the one-degree chi-square reference at level ``eta``."""
    if not 0 < eta < 1:
        raise DomainError(f"Level must lie in (0, 1), got {eta}")
    return float(chi2.isf(eta, df=1))


def combine(kind: Statistic, ta: float, tg: float) -> float:
    """Two-to-one combination of (T_alpha, T_gamma)."""
    if kind is Statistic.T1:
        return math.hypot(ta, tg)
    if kind is Statistic.T2:
        return 0.5 * (ta + tg)
    if kind is Statistic.T3:
        if ta == 0 and tg == 0:
            raise DegenerateStatisticError("T3 is undefined when T_alpha = T_gamma = 0")
        if ta == 0 or tg == 0:
            return math.inf
        return max(ta / tg, tg / ta)
    raise DomainError(f"{kind.value} is not a composite statistic")


def t_components(
    fit1: FitResult,
    fit2: FitResult,
    m: int,
    n: int,
    looks: float,
    metric_alpha: MetricAlpha = MetricAlpha.POOLED_MEAN,
) -> tuple[float, float]:
    """(T_alpha, T_gamma) with the scale metric evaluated at the chosen texture."""
    ta = t_alpha(fit1, fit2, m, n, looks)
    tg = t_gamma(fit1, fit2, m, n, metric_alpha.pick(fit1.alpha, fit2.alpha), looks)
    return ta, tg


def t_combined(
    kind: Statistic | str,
    fit1: FitResult,
    fit2: FitResult,
    m: int,
    n: int,
    looks: float,
    metric_alpha: MetricAlpha | str = MetricAlpha.POOLED_MEAN,
) -> float:
    """Composite statistic T1, T2 or T3 from two-parameter fits."""
    kind = Statistic.parse(kind)
    if not kind.composite:
        raise DomainError(f"{kind.value} is not a composite statistic")
    if not (fit1.feasible and fit2.feasible):
        raise NumericalError("Composite statistics need feasible fits")
    ta, tg = t_components(fit1, fit2, m, n, looks, MetricAlpha.parse(metric_alpha))
    return combine(kind, ta, tg)


def statistic_value(
    kind: Statistic,
    fit1: FitResult,
    fit2: FitResult,
    m: int,
    n: int,
    looks: float,
    metric_alpha: MetricAlpha = MetricAlpha.POOLED_MEAN,
    known_alpha: float | None = None,
) -> float:
    """Any of the five statistics; ``known_alpha`` fixes the scale metric for T_gamma."""
    if kind is Statistic.T_ALPHA:
        return t_alpha(fit1, fit2, m, n, looks)
    if kind is Statistic.T_GAMMA:
        alpha = known_alpha if known_alpha is not None else metric_alpha.pick(fit1.alpha, fit2.alpha)
        return t_gamma(fit1, fit2, m, n, alpha, looks)
    return t_combined(kind, fit1, fit2, m, n, looks, metric_alpha)
