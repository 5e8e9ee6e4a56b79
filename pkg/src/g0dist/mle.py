"""
Maximum-likelihood estimation of G0 parameters with the number of looks known.

Three regimes are supported: texture free (scale known), scale free (texture
known) and both free. Fits maximise the regime's reduced log-likelihood with
BFGS on the unconstrained scale alpha = -exp(u), gamma = exp(v), after
normalising the data by its mean. Feasibility against a box is checked after
the optimizer returns.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass
from enum import Enum
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.optimize import minimize
from scipy.special import gammaln, psi

from .exceptions import DegenerateSampleError, DomainError, NonConvergenceError
from .model import G0Params, Sample, as_values, log_pdf

logger = logging.getLogger(__name__)

MIN_SAMPLE_SIZE = 3

# |u|, |v| beyond this are flat plateaus; clipping keeps exp() finite
_LOG_BOUND = 20.0
_FD_STEP = float(np.finfo(float).eps) ** (1.0 / 3.0)


class Regime(str, Enum):
    """Which parameters are estimated."""

    ALPHA_ONLY = "AlphaOnly"
    GAMMA_ONLY = "GammaOnly"
    BOTH = "Both"

    @classmethod
    def parse(cls, value: str | Regime) -> Regime:
        if isinstance(value, Regime):
            return value
        aliases = {"alpha": cls.ALPHA_ONLY, "gamma": cls.GAMMA_ONLY, "both": cls.BOTH}
        key = value.strip()
        if key.lower() in aliases:
            return aliases[key.lower()]
        try:
            return cls(key)
        except ValueError:
            available = ", ".join([r.value for r in cls] + list(aliases))
            raise DomainError(f"Unknown regime '{value}'. Available: {available}")


@dataclass(frozen=True)
class FeasibilityBox:
    """Acceptance region [alpha_lo, alpha_hi) x (gamma_lo, gamma_hi] for estimates."""

    alpha_lo: float
    alpha_hi: float
    gamma_lo: float
    gamma_hi: float

    def __post_init__(self) -> None:
        if not (self.alpha_lo < self.alpha_hi <= 0):
            raise DomainError(
                f"Box needs alpha_lo < alpha_hi <= 0, got [{self.alpha_lo}, {self.alpha_hi})"
            )
        if not (0 < self.gamma_lo < self.gamma_hi):
            raise DomainError(
                f"Box needs 0 < gamma_lo < gamma_hi, got ({self.gamma_lo}, {self.gamma_hi}]"
            )

    @classmethod
    def around(cls, params: G0Params, factor: float = 15.0) -> FeasibilityBox:
        """The simulation box [factor*alpha, 0) x (0, factor*gamma] built from true parameters."""
        return cls(
            alpha_lo=factor * params.alpha,
            alpha_hi=0.0,
            gamma_lo=float(np.finfo(float).tiny),
            gamma_hi=factor * params.gamma,
        )

    @classmethod
    def for_data(cls, z: Sample | ArrayLike) -> FeasibilityBox:
        """Default box for real data: alpha in [-60, -0.01], gamma in [1e-6, 1e3] x mean."""
        mean = float(np.mean(as_values(z)))
        return cls(alpha_lo=-60.0, alpha_hi=-0.01, gamma_lo=1e-6 * mean, gamma_hi=1e3 * mean)

    def contains(self, alpha: float, gamma: float, regime: Regime = Regime.BOTH) -> bool:
        alpha_ok = self.alpha_lo <= alpha < self.alpha_hi
        gamma_ok = self.gamma_lo < gamma <= self.gamma_hi
        if regime is Regime.ALPHA_ONLY:
            return alpha_ok
        if regime is Regime.GAMMA_ONLY:
            return gamma_ok
        return alpha_ok and gamma_ok

    def to_dict(self) -> dict[str, float]:
        return {
            "alpha_lo": self.alpha_lo,
            "alpha_hi": self.alpha_hi,
            "gamma_lo": self.gamma_lo,
            "gamma_hi": self.gamma_hi,
        }


@dataclass(frozen=True)
class FitResult:
    """Outcome of a maximum-likelihood fit."""

    params_hat: G0Params
    loglik: float
    converged: bool
    feasible: bool
    iterations: int
    regime: Regime

    @property
    def alpha(self) -> float:
        return self.params_hat.alpha

    @property
    def gamma(self) -> float:
        return self.params_hat.gamma

    @property
    def looks(self) -> float:
        return self.params_hat.looks

    def to_dict(self) -> dict[str, Any]:
        return {
            "alpha": self.alpha,
            "gamma": self.gamma,
            "looks": self.looks,
            "loglik": self.loglik,
            "converged": self.converged,
            "feasible": self.feasible,
            "iterations": self.iterations,
            "regime": self.regime.value,
        }


@dataclass(frozen=True)
class FitOptions:
    """Optimizer settings."""

    gradient: str = "central"
    max_iter: int = 500
    gtol: float = 1e-8

    def __post_init__(self) -> None:
        if self.gradient not in ("central", "analytic"):
            raise DomainError(
                f"Unknown gradient '{self.gradient}'. Available: central, analytic"
            )
        if self.max_iter < 1 or self.gtol <= 0:
            raise DomainError("max_iter must be >= 1 and gtol > 0")


# Reduced log-likelihoods


def _check_theta(alpha: float, gamma: float, looks: float) -> None:
    if not alpha < 0:
        raise DomainError(f"alpha must be negative, got {alpha}")
    if not gamma > 0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    if not looks >= 1:
        raise DomainError(f"looks must be >= 1, got {looks}")


def _sum_log_shift(gamma: float, looks: float, x: NDArray[np.float64]) -> float:
    return float(np.log(gamma + looks * x).sum())


def _ll_alpha(alpha: float, gamma: float, looks: float, x: NDArray[np.float64]) -> float:
    n = x.size
    head = gammaln(looks - alpha) - alpha * math.log(gamma) - gammaln(-alpha)
    return float(n * head + alpha * _sum_log_shift(gamma, looks, x))


def _ll_gamma(alpha: float, gamma: float, looks: float, x: NDArray[np.float64]) -> float:
    n = x.size
    return float(-n * alpha * math.log(gamma) + (alpha - looks) * _sum_log_shift(gamma, looks, x))


def _ll_both(alpha: float, gamma: float, looks: float, x: NDArray[np.float64]) -> float:
    n = x.size
    head = gammaln(looks - alpha) - alpha * math.log(gamma) - gammaln(-alpha)
    return float(n * head + (alpha - looks) * _sum_log_shift(gamma, looks, x))


def loglik_alpha(alpha: float, gamma: float, looks: float, z: Sample | ArrayLike) -> float:
    """Reduced log-likelihood in alpha with gamma and L known."""
    _check_theta(alpha, gamma, looks)
    return _ll_alpha(alpha, gamma, looks, as_values(z))


def loglik_gamma(gamma: float, alpha: float, looks: float, z: Sample | ArrayLike) -> float:
    """Reduced log-likelihood in gamma with alpha and L known."""
    _check_theta(alpha, gamma, looks)
    return _ll_gamma(alpha, gamma, looks, as_values(z))


def loglik_both(alpha: float, gamma: float, looks: float, z: Sample | ArrayLike) -> float:
    """Reduced log-likelihood in (alpha, gamma) with L known."""
    _check_theta(alpha, gamma, looks)
    return _ll_both(alpha, gamma, looks, as_values(z))


def loglik_full(params: G0Params, z: Sample | ArrayLike) -> float:
    """Full log-likelihood, the sum of log-densities."""
    return float(np.sum(log_pdf(params, as_values(z))))


def score(alpha: float, gamma: float, looks: float, z: Sample | ArrayLike) -> NDArray[np.float64]:
    """Gradient of the log-likelihood in (alpha, gamma), the digamma system.

    Intensity form: the observations enter as z_i (not z_i squared).
    """
    _check_theta(alpha, gamma, looks)
    x = as_values(z)
    return _score(alpha, gamma, looks, x)


def _score(alpha: float, gamma: float, looks: float, x: NDArray[np.float64]) -> NDArray[np.float64]:
    n = x.size
    shifted = gamma + looks * x
    d_alpha = n * (psi(-alpha) - psi(looks - alpha)) + float(np.log(shifted / gamma).sum())
    d_gamma = -n * alpha / gamma + (alpha - looks) * float((1.0 / shifted).sum())
    return np.array([d_alpha, d_gamma])


_REDUCED: dict[Regime, Callable[[float, float, float, NDArray[np.float64]], float]] = {
    Regime.ALPHA_ONLY: _ll_alpha,
    Regime.GAMMA_ONLY: _ll_gamma,
    Regime.BOTH: _ll_both,
}


# Optimisation


def central_gradient(f: Callable[[NDArray[np.float64]], float], p: NDArray[np.float64]) -> NDArray[np.float64]:
    """Central differences with step eps^(1/3) * (1 + |p_i|)."""
    p = np.asarray(p, dtype=np.float64)
    grad = np.empty_like(p)
    for i in range(p.size):
        h = _FD_STEP * (1.0 + abs(p[i]))
        step = np.zeros_like(p)
        step[i] = h
        grad[i] = (f(p + step) - f(p - step)) / (2.0 * h)
    return grad


def moment_start(
    x: NDArray[np.float64],
    looks: float,
    regime: Regime,
    alpha_known: float | None = None,
    gamma_known: float | None = None,
) -> tuple[float, float]:
    """Starting (alpha, gamma) from the first two sample moments."""
    m1 = float(np.mean(x))
    m2 = float(np.mean(x * x))

    if regime is Regime.ALPHA_ONLY:
        assert gamma_known is not None
        return -(1.0 + gamma_known / m1), gamma_known

    if regime is Regime.GAMMA_ONLY:
        assert alpha_known is not None
        a = -alpha_known
        return alpha_known, m1 * (a - 1.0) if a > 1.0 else m1

    # E(Z^2)/E(Z)^2 = (L+1)/L * (a-1)/(a-2) with a = -alpha
    q = m2 / (m1 * m1) * looks / (looks + 1.0)
    if q > 1.0:
        a = min((2.0 * q - 1.0) / (q - 1.0), 50.0)
        return -a, m1 * (a - 1.0)
    alpha0 = -2.0
    return alpha0, m1 * (-alpha0 - 1.0)


class _Objective:
    """Scaled negative reduced log-likelihood on the unconstrained coordinates."""

    def __init__(
        self,
        x: NDArray[np.float64],
        looks: float,
        regime: Regime,
        alpha_known: float | None,
        gamma_known: float | None,
    ):
        self.x = x
        self.n = x.size
        self.looks = looks
        self.regime = regime
        self.alpha_known = alpha_known
        self.gamma_known = gamma_known
        self.loglik = _REDUCED[regime]

    def theta(self, p: NDArray[np.float64]) -> tuple[float, float]:
        q = np.clip(p, -_LOG_BOUND, _LOG_BOUND)
        if self.regime is Regime.BOTH:
            return -math.exp(q[0]), math.exp(q[1])
        if self.regime is Regime.ALPHA_ONLY:
            assert self.gamma_known is not None
            return -math.exp(q[0]), self.gamma_known
        assert self.alpha_known is not None
        return self.alpha_known, math.exp(q[0])

    def start(self, alpha0: float, gamma0: float) -> NDArray[np.float64]:
        if self.regime is Regime.BOTH:
            return np.array([math.log(-alpha0), math.log(gamma0)])
        if self.regime is Regime.ALPHA_ONLY:
            return np.array([math.log(-alpha0)])
        return np.array([math.log(gamma0)])

    def value(self, p: NDArray[np.float64]) -> float:
        alpha, gamma = self.theta(p)
        ll = self.loglik(alpha, gamma, self.looks, self.x)
        if not math.isfinite(ll):
            return math.inf
        return -ll / self.n

    def central(self, p: NDArray[np.float64]) -> NDArray[np.float64]:
        return central_gradient(self.value, p)

    def analytic(self, p: NDArray[np.float64]) -> NDArray[np.float64]:
        alpha, gamma = self.theta(p)
        d_alpha, d_gamma = _score(alpha, gamma, self.looks, self.x)
        # chain rule: d alpha/du = alpha, d gamma/dv = gamma
        if self.regime is Regime.BOTH:
            g = np.array([d_alpha * alpha, d_gamma * gamma])
        elif self.regime is Regime.ALPHA_ONLY:
            g = np.array([d_alpha * alpha])
        else:
            g = np.array([d_gamma * gamma])
        g[np.abs(p) > _LOG_BOUND] = 0.0
        return -g / self.n


def fit(
    z: Sample | ArrayLike,
    looks: float,
    regime: Regime | str = Regime.BOTH,
    known: float | None = None,
    box: FeasibilityBox | None = None,
    init: tuple[float, float] | None = None,
    options: FitOptions | None = None,
    strict: bool = True,
) -> FitResult:
    """Maximum-likelihood fit of G0 parameters with ``looks`` known.

    Args:
        z: Observations (at least three, not all equal).
        looks: Number of looks L.
        regime: Which parameters are free.
        known: The fixed parameter: gamma for ``AlphaOnly``, alpha for ``GammaOnly``.
        box: Feasibility region; defaults to :meth:`FeasibilityBox.for_data`.
        init: Optional starting (alpha, gamma) in data units.
        options: Optimizer settings.
        strict: Raise :class:`NonConvergenceError` instead of returning an
            unconverged result.

    Returns:
        The fit, with ``feasible`` False when the optimum lies outside ``box``.
    """
    values = as_values(z)
    regime = Regime.parse(regime)
    opts = options or FitOptions()

    if values.size < MIN_SAMPLE_SIZE:
        raise DomainError(f"Fitting needs at least {MIN_SAMPLE_SIZE} observations, got {values.size}")
    if not looks >= 1:
        raise DomainError(f"looks must be >= 1, got {looks}")
    if np.ptp(values) == 0:
        raise DegenerateSampleError("All observations are equal; the sample has zero variance")

    alpha_known: float | None = None
    gamma_known: float | None = None
    if regime is Regime.ALPHA_ONLY:
        if known is None or not known > 0:
            raise DomainError("Regime AlphaOnly needs the known gamma > 0")
        gamma_known = float(known)
    elif regime is Regime.GAMMA_ONLY:
        if known is None or not known < 0:
            raise DomainError("Regime GammaOnly needs the known alpha < 0")
        alpha_known = float(known)

    if box is None:
        box = FeasibilityBox.for_data(values)

    scale = float(np.mean(values))
    x = values / scale
    gamma_known_n = None if gamma_known is None else gamma_known / scale

    if init is not None:
        alpha0, gamma0 = init[0], init[1] / scale
        _check_theta(alpha0, gamma0, looks)
    else:
        alpha0, gamma0 = moment_start(x, looks, regime, alpha_known, gamma_known_n)

    objective = _Objective(x, looks, regime, alpha_known, gamma_known_n)
    jac = objective.central if opts.gradient == "central" else objective.analytic
    res = minimize(
        objective.value,
        objective.start(alpha0, gamma0),
        method="BFGS",
        jac=jac,
        options={"gtol": opts.gtol, "maxiter": opts.max_iter},
    )

    alpha_n, gamma_n = objective.theta(res.x)
    grad_norm = float(np.linalg.norm(res.jac)) if res.jac is not None else math.inf
    finite = bool(np.all(np.isfinite(res.x))) and math.isfinite(res.fun)
    # a precision-loss stop on a flat likelihood is an optimum; the box judges it
    converged = finite and res.nit < opts.max_iter

    params_hat = G0Params(alpha=alpha_n, gamma=gamma_n * scale, looks=looks)
    if regime is Regime.ALPHA_ONLY:
        assert gamma_known is not None
        params_hat = G0Params(alpha=alpha_n, gamma=gamma_known, looks=looks)

    if not converged:
        logger.debug(f"{regime.value} fit stopped: {res.message} (|g|={grad_norm:.3g}, nit={res.nit})")
        if strict:
            raise NonConvergenceError(
                f"{regime.value} fit did not converge after {res.nit} iterations: {res.message}"
            )
        return FitResult(params_hat, math.nan, False, False, int(res.nit), regime)

    feasible = box.contains(params_hat.alpha, params_hat.gamma, regime)
    if not feasible:
        logger.debug(f"{regime.value} fit left the feasibility box: {params_hat}")

    return FitResult(
        params_hat=params_hat,
        loglik=loglik_full(params_hat, values),
        converged=True,
        feasible=feasible,
        iterations=int(res.nit),
        regime=regime,
    )
