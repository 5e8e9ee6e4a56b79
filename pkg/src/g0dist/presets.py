"""
Named experiment budgets and plan templates for the Monte Carlo harness.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

from .exceptions import ConfigurationError
from .mc import Budget, ExperimentPlan, Fixed, Study
from .mle import Regime
from .stats import Statistic


@dataclass(frozen=True)
class Preset:
    """How much work a template does."""

    name: str
    r_max: int
    fixed_replications: int
    test_repetitions: int
    perm: int

    def __str__(self) -> str:
        return self.name


PRESETS = {
    "full": Preset(
        name="full", r_max=5_000_000, fixed_replications=5000, test_repetitions=500, perm=1000
    ),
    "quick": Preset(
        name="quick", r_max=50_000, fixed_replications=500, test_repetitions=100, perm=200
    ),
}

FULL_SIZES = tuple(range(50, 1001, 50))
CURVE_SIZES = tuple(range(50, 951, 100))
QUICK_SIZES = (50, 250, 550, 950)


def get_preset(name: str) -> Preset:
    """Get a budget preset by name."""
    if name not in PRESETS:
        available = ", ".join(PRESETS.keys())
        raise ConfigurationError(f"Unknown preset '{name}'. Available: {available}")
    return PRESETS[name]


def _sizes(preset: Preset, full: tuple[int, ...]) -> tuple[int, ...]:
    return full if preset.name == "full" else QUICK_SIZES


def _estimator_alpha(preset: Preset, seed: int) -> ExperimentPlan:
    return ExperimentPlan(
        name="estimator-alpha",
        study=Study.ESTIMATOR,
        alphas=(-1.5,),
        looks_set=(1.0,),
        sample_sizes=_sizes(preset, FULL_SIZES),
        replication_rule=Fixed(preset.fixed_replications),
        seed=seed,
        regime=Regime.ALPHA_ONLY,
        statistics=(Statistic.T_ALPHA,),
        gamma=1.0,
    )


def _estimator_gamma(preset: Preset, seed: int) -> ExperimentPlan:
    return ExperimentPlan(
        name="estimator-gamma",
        study=Study.ESTIMATOR,
        alphas=(-1.5,),
        looks_set=(1.0,),
        sample_sizes=_sizes(preset, FULL_SIZES),
        replication_rule=Fixed(preset.fixed_replications),
        seed=seed,
        regime=Regime.GAMMA_ONLY,
        statistics=(Statistic.T_GAMMA,),
        gamma=1.0,
    )


def _estimator_both(preset: Preset, seed: int) -> ExperimentPlan:
    return ExperimentPlan(
        name="estimator-both",
        study=Study.ESTIMATOR,
        alphas=(-1.5, -3.0, -4.0),
        looks_set=(1.0, 2.0),
        sample_sizes=_sizes(preset, CURVE_SIZES),
        replication_rule=Budget(preset.r_max),
        seed=seed,
        regime=Regime.BOTH,
        statistics=(Statistic.T_ALPHA, Statistic.T_GAMMA),
    )


def _size_alpha(preset: Preset, seed: int) -> ExperimentPlan:
    return ExperimentPlan(
        name="size-alpha",
        study=Study.SIZE,
        alphas=(-1.5,),
        looks_set=(1.0,),
        sample_sizes=_sizes(preset, FULL_SIZES),
        replication_rule=Fixed(preset.fixed_replications),
        seed=seed,
        regime=Regime.ALPHA_ONLY,
        statistics=(Statistic.T_ALPHA,),
        gamma=1.0,
    )


def _size_gamma(preset: Preset, seed: int) -> ExperimentPlan:
    return ExperimentPlan(
        name="size-gamma",
        study=Study.SIZE,
        alphas=(-1.5,),
        looks_set=(1.0,),
        sample_sizes=_sizes(preset, FULL_SIZES),
        replication_rule=Fixed(preset.fixed_replications),
        seed=seed,
        regime=Regime.GAMMA_ONLY,
        statistics=(Statistic.T_GAMMA,),
        gamma=1.0,
    )


def _joint(preset: Preset, seed: int) -> ExperimentPlan:
    return ExperimentPlan(
        name="joint",
        study=Study.JOINT,
        alphas=(-1.5, -3.0, -4.0),
        looks_set=(1.0, 2.0),
        sample_sizes=(50,),
        replication_rule=Budget(preset.r_max),
        seed=seed,
        regime=Regime.BOTH,
        statistics=(Statistic.T_ALPHA, Statistic.T_GAMMA),
    )


def _rejection_grid(preset: Preset, seed: int) -> ExperimentPlan:
    return ExperimentPlan(
        name="rejection-grid",
        study=Study.SIZE,
        alphas=(-1.5, -4.0),
        looks_set=(1.0, 2.0),
        sample_sizes=(50, 550, 5000),
        replication_rule=Fixed(preset.test_repetitions),
        seed=seed,
        regime=Regime.BOTH,
        statistics=(Statistic.T1, Statistic.T2, Statistic.T3),
        perm=preset.perm,
    )


def _size_curve(preset: Preset, seed: int) -> ExperimentPlan:
    return ExperimentPlan(
        name="size-curve",
        study=Study.SIZE,
        alphas=(-1.5,),
        looks_set=(1.0,),
        sample_sizes=CURVE_SIZES,
        replication_rule=Fixed(preset.test_repetitions),
        seed=seed,
        regime=Regime.BOTH,
        statistics=(Statistic.T3,),
        perm=preset.perm,
    )


TEMPLATES: dict[str, Callable[[Preset, int], ExperimentPlan]] = {
    "estimator-alpha": _estimator_alpha,
    "estimator-gamma": _estimator_gamma,
    "estimator-both": _estimator_both,
    "size-alpha": _size_alpha,
    "size-gamma": _size_gamma,
    "joint": _joint,
    "rejection-grid": _rejection_grid,
    "size-curve": _size_curve,
}


def build_plan(template: str, preset: str = "quick", seed: int = 0) -> ExperimentPlan:
    """Instantiate a named plan template at the given budget."""
    if template not in TEMPLATES:
        available = ", ".join(TEMPLATES.keys())
        raise ConfigurationError(f"Unknown plan template '{template}'. Available: {available}")
    return TEMPLATES[template](get_preset(preset), seed)
