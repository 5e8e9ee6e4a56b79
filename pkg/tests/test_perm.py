"""Tests for permutation calibration."""

import logging

import numpy as np
import pytest

import g0dist.perm as perm_module
from g0dist.config import Settings
from g0dist.exceptions import DomainError, InfeasibleFitError
from g0dist.mle import Regime
from g0dist.model import G0Params, sample
from g0dist.perm import (
    FitFailurePolicy,
    PermutationConfig,
    permutation_test,
    permutation_test_many,
    split_pooled,
    two_sample_test,
)
from g0dist.stats import Calibration, Statistic
from g0dist.utils import derive_rng


def test_config_validation():
    with pytest.raises(DomainError):
        PermutationConfig(perm=0)
    with pytest.raises(DomainError):
        PermutationConfig(eta=1.0)
    cfg = PermutationConfig(kind="t2", on_fit_failure="retry", metric_alpha="first")
    assert cfg.kind is Statistic.T2
    assert cfg.on_fit_failure is FitFailurePolicy.RETRY


def test_config_from_settings():
    settings = Settings(threads=3, perm=250, eta=0.1, on_fit_failure="abort")
    cfg = PermutationConfig.from_settings(settings, seed=9, perm=40)
    assert cfg.perm == 40
    assert cfg.eta == 0.1
    assert cfg.threads == 3
    assert cfg.seed == 9
    assert cfg.on_fit_failure is FitFailurePolicy.ABORT


def test_split_keeps_group_sizes():
    pooled = np.arange(1.0, 11.0)
    g1, g2 = split_pooled(pooled, 4, derive_rng(1, 1))
    assert g1.size == 4 and g2.size == 6
    assert sorted(np.concatenate([g1, g2])) == pooled.tolist()


def test_shuffles_are_exchangeable():
    """A tagged observation joins the first group with frequency m / (m + n)."""
    pooled = np.arange(1.0, 51.0)
    shuffles = 4000
    hits = sum(1.0 in split_pooled(pooled, 20, derive_rng(7, k))[0] for k in range(shuffles))
    se = np.sqrt(0.4 * 0.6 / shuffles)
    assert abs(hits / shuffles - 0.4) < 4 * se


def test_decision_invariant_under_monotone_transform(monkeypatch, pair_different_law):
    cfg = PermutationConfig(perm=30, seed=6, kind=Statistic.T2)
    base = permutation_test(*pair_different_law, 1.0, cfg)

    original = perm_module.statistic_value
    monkeypatch.setattr(
        perm_module, "statistic_value", lambda *args, **kwargs: 2 * original(*args, **kwargs) + 1
    )
    shifted = permutation_test(*pair_different_law, 1.0, cfg)
    assert shifted.observed == pytest.approx(2 * base.observed + 1)
    np.testing.assert_allclose(shifted.permuted, 2 * base.permuted + 1)
    assert shifted.p_value == base.p_value
    assert shifted.rejected == base.rejected


def test_identical_samples_give_p_one(pair_same_law):
    """The observed statistic is zero, so every replicate is at least as large."""
    z, _ = pair_same_law
    result = permutation_test(z, z, 1.0, PermutationConfig(perm=30, seed=5))
    assert result.observed == 0.0
    assert result.p_value == 1.0
    assert not result.rejected


def test_determinism(pair_same_law):
    cfg = PermutationConfig(perm=25, seed=77)
    a = permutation_test(*pair_same_law, 1.0, cfg)
    b = permutation_test(*pair_same_law, 1.0, cfg)
    np.testing.assert_array_equal(a.permuted, b.permuted)
    assert a.p_value == b.p_value


def test_thread_count_does_not_change_result(pair_same_law):
    single = permutation_test(*pair_same_law, 1.0, PermutationConfig(perm=24, seed=3, threads=1))
    pooled = permutation_test(*pair_same_law, 1.0, PermutationConfig(perm=24, seed=3, threads=4))
    np.testing.assert_array_equal(single.permuted, pooled.permuted)


def test_counts_ties_without_correction(monkeypatch, pair_same_law):
    """p = #{T_k >= T_obs} / P with no +1 in numerator or denominator."""
    values = iter([2.0, 1.0, 2.0, 3.0, 0.5])
    monkeypatch.setattr(perm_module, "fit_pair", lambda *args, **kwargs: (None, None))
    monkeypatch.setattr(perm_module, "statistic_value", lambda *args, **kwargs: next(values))
    result = permutation_test(*pair_same_law, 1.0, PermutationConfig(perm=4, seed=1))
    assert result.permuted.tolist() == [1.0, 2.0, 3.0, 0.5]
    assert result.p_value == 0.5


def test_shared_shuffles_for_several_statistics(pair_same_law):
    results = permutation_test_many(
        *pair_same_law, 1.0, PermutationConfig(perm=20, seed=2), kinds=(Statistic.T1, Statistic.T2)
    )
    t1, t2 = results[Statistic.T1], results[Statistic.T2]
    assert t1.effective == t2.effective
    # T2 <= T1 replicate by replicate
    assert np.all(t2.permuted <= t1.permuted * (1 + 1e-12))


def _failing_after_observed(monkeypatch):
    """Let the observed fit through, then fail every permutation refit."""
    real = perm_module.fit_pair
    calls = {"n": 0}

    def fake(*args, **kwargs):
        calls["n"] += 1
        if calls["n"] == 1:
            return real(*args, **kwargs)
        raise InfeasibleFitError("forced")

    monkeypatch.setattr(perm_module, "fit_pair", fake)
    return calls


def test_skip_policy_all_failed(monkeypatch, pair_same_law, caplog):
    _failing_after_observed(monkeypatch)
    with caplog.at_level(logging.WARNING, logger="g0dist.perm"):
        result = permutation_test(*pair_same_law, 1.0, PermutationConfig(perm=5, seed=1))
    assert result.skipped == 5
    assert result.effective == 0
    assert result.p_value == 1.0
    assert "Every permutation failed" in caplog.text


def test_retry_policy_draws_again(monkeypatch, pair_same_law):
    calls = _failing_after_observed(monkeypatch)
    cfg = PermutationConfig(perm=5, seed=1, on_fit_failure="retry")
    result = permutation_test(*pair_same_law, 1.0, cfg)
    assert result.skipped == 5
    assert calls["n"] == 1 + 2 * 5


def test_abort_policy_raises(monkeypatch, pair_same_law):
    _failing_after_observed(monkeypatch)
    with pytest.raises(InfeasibleFitError):
        permutation_test(*pair_same_law, 1.0, PermutationConfig(perm=5, on_fit_failure="abort"))


def test_small_samples_rejected():
    with pytest.raises(DomainError, match="at least 3"):
        permutation_test([1.0, 2.0], [1.0, 2.0, 3.0], 1.0, PermutationConfig(perm=5))


def test_dump_permuted(temp_dir, pair_same_law):
    result = permutation_test(*pair_same_law, 1.0, PermutationConfig(perm=6, seed=4))
    path = result.dump_permuted(temp_dir / "perm.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == "k,T1"
    assert len(lines) == 1 + result.effective
    assert result.to_dict(include_permuted=True)["permuted"][0] == pytest.approx(result.permuted[0])


def test_two_sample_chi2_defaults(pair_same_law):
    outcome, result = two_sample_test(*pair_same_law, 1.0, "TAlpha")
    assert result is None
    assert outcome.calibration is Calibration.CHI2
    assert 0.0 <= outcome.p_value <= 1.0
    assert outcome.m == outcome.n == 60


def test_two_sample_known_parameters(pair_same_law):
    outcome, _ = two_sample_test(*pair_same_law, 1.0, Statistic.T_ALPHA, known_gamma=0.5)
    assert outcome.value >= 0
    outcome, _ = two_sample_test(*pair_same_law, 1.0, Statistic.T_GAMMA, known_alpha=-1.5)
    assert outcome.value >= 0
    with pytest.raises(DomainError):
        two_sample_test(*pair_same_law, 1.0, "T1", known_alpha=-1.5)
    with pytest.raises(DomainError):
        two_sample_test(*pair_same_law, 1.0, "TAlpha", known_alpha=-1.5, known_gamma=0.5)


def test_composites_need_permutation(pair_same_law):
    with pytest.raises(DomainError, match="permutation"):
        two_sample_test(*pair_same_law, 1.0, "T3", calibration="Chi2Asymptotic")
    outcome, result = two_sample_test(
        *pair_same_law, 1.0, "T2", cfg=PermutationConfig(perm=15, seed=8)
    )
    assert outcome.calibration is Calibration.PERMUTATION
    assert outcome.details["perm"] == 15
    assert result.kind is Statistic.T2


def test_different_textures_rejected():
    """A heavy texture against a smoother one is detected at moderate sizes."""
    z1 = sample(G0Params.unit_mean(-1.5), 300, seed=41)
    z2 = sample(G0Params.unit_mean(-3.0), 300, seed=42)
    outcome, _ = two_sample_test(z1, z2, 1.0, "TAlpha")
    assert outcome.rejected
    result = permutation_test(z1, z2, 1.0, PermutationConfig(perm=50, seed=6), regime=Regime.BOTH)
    assert result.p_value < 0.05
