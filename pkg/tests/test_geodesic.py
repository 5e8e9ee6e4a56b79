"""Tests for geodesic distances."""

import logging
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from g0dist.exceptions import DomainError
from g0dist.geodesic import (
    BRANCH_L1,
    BRANCH_L2,
    BRANCH_QUADRATURE,
    BRANCH_SCALE,
    GeodesicSpec,
    dist_alpha,
    dist_alpha_quadrature,
    dist_gamma,
    distance,
    integer_looks,
    texture_distance,
    texture_integrand,
)

alphas = st.floats(min_value=-40.0, max_value=-0.01)


def test_single_look_closed_form():
    assert dist_alpha(-1.0, -2.0, 1) == pytest.approx(math.log(2.0))
    assert dist_alpha(-1.0, -math.e, 1) == pytest.approx(1.0)
    assert texture_distance(-1.0, -2.0, 1).branch == BRANCH_L1


def test_zero_length():
    for looks in (1, 2, 3, 6):
        assert dist_alpha(-2.5, -2.5, looks) == 0.0


def test_closed_forms_match_quadrature():
    """L = 1 and L = 2 closed forms agree with the quadrature of the metric."""
    rng = np.random.default_rng(2024)
    pairs = rng.uniform(-20.0, -1.1, size=(100, 2))
    for looks in (1, 2):
        for a1, a2 in pairs:
            closed = texture_distance(a1, a2, looks)
            assert closed.branch == (BRANCH_L1 if looks == 1 else BRANCH_L2)
            assert abs(closed.value - dist_alpha_quadrature(a1, a2, looks)) < 1e-8


def test_two_looks_near_zero_texture():
    for a1, a2 in [(-0.01, -0.5), (-0.002, -0.003), (-0.3, -45.0)]:
        assert texture_distance(a1, a2, 2).value == pytest.approx(
            dist_alpha_quadrature(a1, a2, 2), rel=1e-8
        )


def test_quadrature_branch():
    d = texture_distance(-2.0, -5.0, 4)
    assert d.branch == BRANCH_QUADRATURE
    assert d.value > texture_distance(-2.0, -5.0, 2).value


def test_integrand():
    """For L = 1 the metric density is 1/|alpha|; L = 2 adds the next term."""
    assert texture_integrand(-4.0, 1) == pytest.approx(0.25)
    assert texture_integrand(-4.0, 2) == pytest.approx(math.sqrt(1 / 16 + 1 / 25))


def test_guards():
    with pytest.raises(DomainError, match="negative"):
        dist_alpha(0.5, -1.0, 1)
    with pytest.raises(DomainError, match="too close"):
        dist_alpha(-1e-4, -1.0, 2)
    with pytest.raises(DomainError):
        dist_alpha(-1.0, -2.0, 0.5)


def test_fractional_looks_rounded(caplog):
    with caplog.at_level(logging.WARNING, logger="g0dist.geodesic"):
        assert integer_looks(2.4) == 2
    assert "rounding" in caplog.text
    assert integer_looks(3.0) == 3


def test_dist_gamma():
    assert dist_gamma(5.0, 5.0, -3.0, 2) == 0.0
    assert dist_gamma(2.0, 1.0, -2.0, 1) == pytest.approx(math.log(2) / math.sqrt(2))
    with pytest.raises(DomainError):
        dist_gamma(0.0, 1.0, -2.0, 1)


def test_distance_dispatch():
    texture = distance(GeodesicSpec(looks=1), -1.0, -2.0)
    assert texture.value == pytest.approx(math.log(2))
    scale = distance(GeodesicSpec(looks=1, fixed_alpha=-2.0), 2.0, 1.0)
    assert scale.branch == BRANCH_SCALE
    assert scale.to_dict()["value"] == pytest.approx(math.log(2) / math.sqrt(2))
    with pytest.raises(DomainError):
        GeodesicSpec(looks=1, fixed_alpha=1.0)


@settings(max_examples=60, deadline=None)
@given(a=alphas, b=alphas, looks=st.sampled_from([1, 2, 3]))
def test_symmetry(a, b, looks):
    assert dist_alpha(a, b, looks) == pytest.approx(dist_alpha(b, a, looks), rel=1e-12, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(a=alphas, b=alphas, c=alphas, looks=st.sampled_from([1, 2, 3]))
def test_additive_along_the_line(a, b, c, looks):
    """Distances add up when the middle point lies between the ends."""
    lo, mid, hi = sorted([a, b, c])
    assume(hi - lo > 1e-6)
    whole = dist_alpha(lo, hi, looks)
    parts = dist_alpha(lo, mid, looks) + dist_alpha(mid, hi, looks)
    assert whole == pytest.approx(parts, rel=1e-8, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(
    g1=st.floats(min_value=1e-3, max_value=1e3),
    g2=st.floats(min_value=1e-3, max_value=1e3),
    c=st.floats(min_value=1e-3, max_value=1e3),
    alpha=alphas,
    looks=st.integers(min_value=1, max_value=6),
)
def test_scale_invariance(g1, g2, c, alpha, looks):
    assert dist_gamma(c * g1, c * g2, alpha, looks) == pytest.approx(
        dist_gamma(g1, g2, alpha, looks), rel=1e-9, abs=1e-12
    )
