"""
Geodesic distances between G0 models with one free parameter and L known.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from scipy import integrate
from scipy.special import polygamma

from .exceptions import DomainError

logger = logging.getLogger(__name__)

# below this |alpha| the texture integrand blows up like 1/|alpha|
ALPHA_GUARD = -1e-3
QUADRATURE_TOL = 1e-10

BRANCH_L1 = "closed-form-L1"
BRANCH_L2 = "closed-form-L2"
BRANCH_QUADRATURE = "quadrature"
BRANCH_SCALE = "closed-form-scale"


@dataclass(frozen=True)
class GeodesicSpec:
    """Metric settings: the number of looks and, for the scale distance, the texture."""

    looks: float
    fixed_alpha: float | None = None

    def __post_init__(self) -> None:
        if not self.looks >= 1:
            raise DomainError(f"looks must be >= 1, got {self.looks}")
        if self.fixed_alpha is not None and not self.fixed_alpha < 0:
            raise DomainError(f"fixed_alpha must be negative, got {self.fixed_alpha}")

    @property
    def integer_looks(self) -> int:
        return integer_looks(self.looks)


@dataclass(frozen=True)
class Distance:
    value: float
    branch: str

    def to_dict(self) -> dict[str, float | str]:
        return {"value": self.value, "branch": self.branch}


def integer_looks(looks: float) -> int:
    """Round fractional looks to the nearest integer (the texture metric sums over 1..L)."""
    if not looks >= 1:
        raise DomainError(f"looks must be >= 1, got {looks}")
    rounded = max(1, int(round(looks)))
    if rounded != looks:
        logger.warning(f"Texture distance needs integer looks; rounding L={looks} to {rounded}")
    return rounded


def _check_alpha(alpha: float) -> None:
    if not alpha < 0:
        raise DomainError(f"alpha must be negative, got {alpha}")
    if alpha > ALPHA_GUARD:
        raise DomainError(f"alpha={alpha} is too close to 0 for a well-conditioned distance")


def _r_aux(alpha: float) -> float:
    """R(alpha) = sqrt((4a^2 - 4a + 2) / ((a - 1)^2 a^2))."""
    return math.sqrt((4 * alpha * alpha - 4 * alpha + 2) / ((alpha - 1) ** 2 * alpha * alpha))


def _antiderivative_l2(alpha: float) -> float:
    # s = sqrt(2a^2 - 2a + 1), recovered from R since R = sqrt(2) s / (a (a - 1))
    s = alpha * (alpha - 1) * _r_aux(alpha) / math.sqrt(2.0)
    return (
        math.sqrt(2.0) * math.asinh(2 * alpha - 1)
        + math.log((alpha - 1) / alpha)
        + math.log(1 - alpha + s)
        - math.log(alpha + s)
    )


def texture_integrand(alpha: float, looks: int) -> float:
    """sqrt(sum_{k=1..L} (-alpha + k - 1)^-2), via trigamma differences."""
    a = -alpha
    total = float(polygamma(1, a) - polygamma(1, a + looks))
    return math.sqrt(total)


def dist_alpha_quadrature(alpha1: float, alpha2: float, looks: int, tol: float = QUADRATURE_TOL) -> float:
    """Texture distance by adaptive quadrature of the metric integrand."""
    if alpha1 == alpha2:
        return 0.0
    value, _ = integrate.quad(
        texture_integrand, alpha1, alpha2, args=(looks,), epsabs=tol, epsrel=1e-12, limit=200
    )
    return abs(value)


def texture_distance(alpha1: float, alpha2: float, looks: float, tol: float = QUADRATURE_TOL) -> Distance:
    """Texture distance together with the evaluation branch taken."""
    _check_alpha(alpha1)
    _check_alpha(alpha2)
    L = integer_looks(looks)
    if L == 1:
        return Distance(abs(math.log(alpha1 / alpha2)), BRANCH_L1)
    if L == 2:
        return Distance(abs(_antiderivative_l2(alpha2) - _antiderivative_l2(alpha1)), BRANCH_L2)
    return Distance(dist_alpha_quadrature(alpha1, alpha2, L, tol), BRANCH_QUADRATURE)


def dist_alpha(alpha1: float, alpha2: float, looks: float) -> float:
    """Geodesic distance between G0(alpha1, gamma, L) and G0(alpha2, gamma, L)."""
    return texture_distance(alpha1, alpha2, looks).value


def dist_gamma(gamma1: float, gamma2: float, alpha: float, looks: float) -> float:
    """Geodesic distance between G0(alpha, gamma1, L) and G0(alpha, gamma2, L)."""
    if not (gamma1 > 0 and gamma2 > 0):
        raise DomainError(f"gammas must be positive, got {gamma1}, {gamma2}")
    if not alpha < 0:
        raise DomainError(f"alpha must be negative, got {alpha}")
    if not looks >= 1:
        raise DomainError(f"looks must be >= 1, got {looks}")
    factor = math.sqrt(-alpha * looks / (-alpha + looks + 1))
    return abs(factor * math.log(gamma1 / gamma2))


def distance(spec: GeodesicSpec, theta1: float, theta2: float) -> Distance:
    """Texture distance when ``spec.fixed_alpha`` is unset, scale distance otherwise."""
    if spec.fixed_alpha is None:
        return texture_distance(theta1, theta2, spec.looks)
    return Distance(dist_gamma(theta1, theta2, spec.fixed_alpha, spec.looks), BRANCH_SCALE)
