"""Tests for scan-line edge detection."""

import logging
from types import SimpleNamespace

import numpy as np
import pandas as pd
import pytest

import g0dist.edge as edge_module
from g0dist.edge import (
    MIN_COLS,
    ImageStrip,
    clip_zeros,
    detect_edges,
    detect_row,
    split_seed,
    two_region_strip,
    write_edges,
    write_profiles,
)
from g0dist.exceptions import DomainError, InfeasibleFitError, RowDegenerateError
from g0dist.model import G0Params
from g0dist.perm import PermutationConfig
from g0dist.stats import Statistic

LEFT = G0Params(-1.5, 0.5, 1.0)
RIGHT = G0Params(-8.0, 7.0, 1.0)


def scripted_tests(monkeypatch, p_values):
    """Replace the permutation test by a lookup of p-values keyed by split size."""

    def fake(z1, z2, looks, cfg, regime=None, box=None):
        p = p_values[len(z1)]
        if p is None:
            raise InfeasibleFitError("scripted failure")
        return SimpleNamespace(p_value=p, observed=1.0 - p, skipped=0)

    monkeypatch.setattr(edge_module, "permutation_test", fake)


def test_strip_validation():
    assert MIN_COLS == 7
    with pytest.raises(DomainError, match="at least 7"):
        ImageStrip(np.ones((2, 6)))
    with pytest.raises(DomainError, match="two-dimensional"):
        ImageStrip(np.ones(10))
    with pytest.raises(DomainError, match="nonnegative"):
        ImageStrip(-np.ones((1, 10)))
    strip = ImageStrip(np.ones((3, 9)), looks=2.0)
    assert (strip.rows, strip.cols) == (3, 9)


def test_clip_zeros():
    assert clip_zeros([0.0, 2.0, 4.0]).tolist() == [1.0, 2.0, 4.0]
    assert clip_zeros([3.0, 5.0]).tolist() == [3.0, 5.0]
    with pytest.raises(RowDegenerateError):
        clip_zeros([0.0, 0.0, 0.0])


def test_split_seeds_differ():
    assert split_seed(1, 0, 3) != split_seed(1, 0, 4)
    assert split_seed(1, 0, 3) != split_seed(1, 1, 3)
    assert split_seed(1, 2, 5) == split_seed(1, 2, 5)


def test_smallest_row_has_two_splits(monkeypatch):
    scripted_tests(monkeypatch, {3: 0.4, 4: 0.3})
    edge = detect_row(np.arange(1.0, 8.0), 1.0, PermutationConfig(perm=5))
    assert [s.k for s in edge.profile] == [3, 4]
    assert edge.col_hat == 4
    assert edge.min_p == 0.3


def test_ties_go_to_smallest_split(monkeypatch):
    scripted_tests(monkeypatch, {3: 0.2, 4: 0.1, 5: 0.1, 6: 0.5})
    edge = detect_row(np.arange(1.0, 10.0), 1.0, PermutationConfig(perm=5))
    assert edge.col_hat == 4


def test_failed_splits_are_not_selected(monkeypatch):
    scripted_tests(monkeypatch, {3: None, 4: 0.9, 5: None, 6: 0.8})
    edge = detect_row(np.arange(1.0, 10.0), 1.0, PermutationConfig(perm=5))
    assert edge.col_hat == 6
    failed = [s for s in edge.profile if s.status == "failed"]
    assert [s.k for s in failed] == [3, 5]
    assert all(s.p_value == 1.0 for s in failed)


def test_all_splits_failing(monkeypatch):
    scripted_tests(monkeypatch, dict.fromkeys(range(3, 7)))
    with pytest.raises(RowDegenerateError):
        detect_row(np.arange(1.0, 10.0), 1.0, PermutationConfig(perm=5))
    with pytest.raises(InfeasibleFitError):
        detect_row(np.arange(1.0, 10.0), 1.0, PermutationConfig(perm=5, on_fit_failure="abort"))


def test_degenerate_rows_reported_without_edge(monkeypatch, caplog):
    scripted_tests(monkeypatch, dict.fromkeys(range(3, 8)))
    strip = ImageStrip(np.ones((2, 10)))
    with caplog.at_level(logging.WARNING, logger="g0dist.edge"):
        result = detect_edges(strip, "T1", PermutationConfig(perm=5))
    assert all(r.degenerate for r in result.rows)
    edges = result.edges()
    assert edges["col_hat"].isna().all()
    assert edges["min_p"].isna().all()
    assert result.to_dict()["degenerate_rows"] == 2
    assert "Row 0" in caplog.text


def test_short_row_rejected():
    with pytest.raises(DomainError):
        detect_row(np.ones(6), 1.0, PermutationConfig(perm=5))


def test_two_region_strip():
    strip = two_region_strip(3, 20, 8, LEFT, RIGHT, seed=1)
    assert (strip.rows, strip.cols) == (3, 20)
    again = two_region_strip(3, 20, 8, LEFT, RIGHT, seed=1)
    np.testing.assert_array_equal(strip.pixels, again.pixels)
    with pytest.raises(DomainError):
        two_region_strip(3, 20, 20, LEFT, RIGHT, seed=1)
    with pytest.raises(DomainError):
        two_region_strip(3, 20, 8, LEFT, G0Params(-8.0, 7.0, 2.0), seed=1)


def test_detection_is_deterministic():
    strip = two_region_strip(2, 16, 8, LEFT, RIGHT, seed=3)
    serial = detect_edges(strip, Statistic.T1, PermutationConfig(perm=8, seed=5, threads=1))
    again = detect_edges(strip, Statistic.T1, PermutationConfig(perm=8, seed=5, threads=1))
    threaded = detect_edges(strip, Statistic.T1, PermutationConfig(perm=8, seed=5, threads=2))
    pd.testing.assert_frame_equal(serial.edges(), again.edges())
    pd.testing.assert_frame_equal(serial.edges(), threaded.edges())
    pd.testing.assert_frame_equal(serial.profiles(), threaded.profiles())
    for row in serial.rows:
        if row.degenerate:
            assert row.profile == []
        else:
            assert [s.k for s in row.profile] == list(range(3, 14))
            assert 3 <= row.col_hat <= 13


def test_reversed_row_mirrors_the_edge(monkeypatch):
    """A swap-symmetric test gives the split n - k on the reversed row."""

    def fake(z1, z2, looks, cfg, regime=None, box=None):
        gap = abs(np.log(np.mean(z1)) - np.log(np.mean(z2)))
        return SimpleNamespace(p_value=float(np.exp(-gap)), observed=gap, skipped=0)

    monkeypatch.setattr(edge_module, "permutation_test", fake)
    row = two_region_strip(1, 24, 9, LEFT, RIGHT, seed=11).pixels[0]
    cfg = PermutationConfig(perm=5, seed=1)
    forward = detect_row(row, 1.0, cfg)
    backward = detect_row(row[::-1], 1.0, cfg)
    assert backward.col_hat == row.size - forward.col_hat
    assert backward.min_p == pytest.approx(forward.min_p)


def test_detection_rate_and_outputs(temp_dir):
    rows = [
        edge_module.RowEdge(row=0, col_hat=50, min_p=0.0),
        edge_module.RowEdge(row=1, col_hat=57, min_p=0.01),
        edge_module.RowEdge(row=2, col_hat=None, min_p=float("nan")),
        edge_module.RowEdge(
            row=3, col_hat=46, min_p=0.0, profile=[edge_module.Split(46, 0.0, 9.5, "ok")]
        ),
    ]
    result = edge_module.EdgeResult(kind=Statistic.T1, cols=100, rows=rows)
    assert result.detection_rate(50) == 0.5
    assert result.detection_rate(50, tolerance=7) == 0.75

    edges_path = write_edges(result, temp_dir / "edges.csv")
    back = pd.read_csv(edges_path)
    assert back.columns.tolist() == ["row", "col_hat", "min_p"]
    assert back["col_hat"].isna().sum() == 1

    profile = pd.read_csv(write_profiles(result, temp_dir / "profiles.csv"))
    assert profile[["row", "k"]].values.tolist() == [[3, 46]]


@pytest.mark.slow
def test_two_region_benchmark():
    """50 rows of 100 pixels: the transition at column 50 is found within 5 pixels."""
    strip = two_region_strip(50, 100, 50, LEFT, RIGHT, seed=2024)
    result = detect_edges(strip, "T1", PermutationConfig(perm=200, seed=7, threads=8))
    assert result.detection_rate(50, tolerance=5) >= 0.9
