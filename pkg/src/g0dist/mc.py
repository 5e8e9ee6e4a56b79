"""
Monte Carlo harness for estimator, test-size and joint-dependence studies.

A plan expands to cells (alpha, L, n). Replication r of cell c draws from the
generator addressed by (seed, c, r), so results do not depend on worker count
or execution order. Every replication ends as feasible, infeasible (a fit left
the box) or failed (the optimizer gave up); only feasible ones enter the
summaries.
"""

from __future__ import annotations

import json
import logging
import math
import time
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
import tomlkit
from numpy.typing import NDArray
from rich.progress import BarColumn, Progress, SpinnerColumn, TextColumn

from .exceptions import ConfigurationError, DomainError, InfeasibleFitError, NumericalError
from .mle import FeasibilityBox, FitOptions, FitResult, Regime, fit
from .model import G0Params, draw, unit_mean_gamma
from .perm import FitFailurePolicy, PermutationConfig, permutation_test_many
from .stats import MetricAlpha, Statistic, chi2_cutoff, p_value_chi2, statistic_value
from .utils import atomic_write_text, derive_rng, ensure_directory

logger = logging.getLogger(__name__)

ERROR_THRESHOLDS = (0.10, 0.11, 0.12, 0.13)
UNIFORMITY_LEVELS = (0.01, 0.05, 0.10)

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
FAILED = "failed"


class Study(str, Enum):
    ESTIMATOR = "estimator"
    SIZE = "size"
    JOINT = "joint"


@dataclass(frozen=True)
class Fixed:
    """The same number of replications for every sample size."""

    count: int

    def replications(self, n: int) -> int:
        return self.count

    def to_dict(self) -> dict[str, int]:
        return {"fixed": self.count}


@dataclass(frozen=True)
class Budget:
    """floor(r_max / n) replications, constant total sample volume."""

    r_max: int

    def replications(self, n: int) -> int:
        return self.r_max // n

    def to_dict(self) -> dict[str, int]:
        return {"budget": self.r_max}


ReplicationRule = Fixed | Budget


def parse_rule(spec: Any) -> ReplicationRule:
    if isinstance(spec, (Fixed, Budget)):
        return spec
    if isinstance(spec, dict) and len(spec) == 1:
        (key, value), = spec.items()
        if key == "fixed":
            return Fixed(int(value))
        if key == "budget":
            return Budget(int(float(value)))
    raise ConfigurationError(
        f"Invalid replication rule {spec!r}. Use {{\"fixed\": R}} or {{\"budget\": R_max}}"
    )


@dataclass(frozen=True)
class Cell:
    index: int
    alpha: float
    gamma: float
    looks: float
    n: int
    replications: int

    @property
    def params(self) -> G0Params:
        return G0Params(self.alpha, self.gamma, self.looks)

    def key(self) -> dict[str, Any]:
        return {"alpha": self.alpha, "gamma": self.gamma, "looks": self.looks, "n": self.n}


@dataclass(frozen=True)
class ExperimentPlan:
    """What to simulate: a parameter grid, sample sizes and how often."""

    study: Study
    alphas: tuple[float, ...]
    looks_set: tuple[float, ...]
    sample_sizes: tuple[int, ...]
    replication_rule: ReplicationRule
    seed: int
    regime: Regime = Regime.BOTH
    statistics: tuple[Statistic, ...] = (Statistic.T1,)
    gamma: float | None = None
    eta: float = 0.05
    perm: int = 1000
    box_factor: float = 15.0
    thresholds: tuple[float, ...] = ERROR_THRESHOLDS
    metric_alpha: MetricAlpha = MetricAlpha.POOLED_MEAN
    name: str = "custom"

    def __post_init__(self) -> None:
        object.__setattr__(self, "study", Study(self.study))
        object.__setattr__(self, "regime", Regime.parse(self.regime))
        object.__setattr__(self, "statistics", tuple(Statistic.parse(s) for s in self.statistics))
        object.__setattr__(self, "metric_alpha", MetricAlpha.parse(self.metric_alpha))
        object.__setattr__(self, "replication_rule", parse_rule(self.replication_rule))
        if not self.alphas or any(a >= 0 for a in self.alphas):
            raise ConfigurationError("alphas must be a nonempty list of negative values")
        if self.gamma is None and any(a >= -1 for a in self.alphas):
            raise ConfigurationError("Unit-mean scaling needs every alpha < -1; set gamma explicitly")
        if self.gamma is not None and self.gamma <= 0:
            raise ConfigurationError(f"gamma must be positive, got {self.gamma}")
        if not self.looks_set or any(L < 1 for L in self.looks_set):
            raise ConfigurationError("looks_set must be a nonempty list of values >= 1")
        if not self.sample_sizes or any(n < 3 for n in self.sample_sizes):
            raise ConfigurationError("sample sizes must be >= 3")
        for n in self.sample_sizes:
            if self.replication_rule.replications(n) < 1:
                raise ConfigurationError(f"The replication rule gives no replications at n={n}")
        if not 0 < self.eta < 1 or self.perm < 1 or self.seed < 0:
            raise ConfigurationError("Need 0 < eta < 1, perm >= 1 and a non-negative seed")
        if self.study is Study.JOINT and self.regime is not Regime.BOTH:
            raise ConfigurationError("The joint-dependence study needs regime Both")
        composite = [s for s in self.statistics if s.composite]
        if composite and self.regime is not Regime.BOTH:
            raise ConfigurationError("Composite statistics need regime Both")

    def gamma_for(self, alpha: float) -> float:
        return self.gamma if self.gamma is not None else unit_mean_gamma(alpha)

    def cells(self) -> list[Cell]:
        out = []
        for alpha in self.alphas:
            for looks in self.looks_set:
                for n in self.sample_sizes:
                    out.append(
                        Cell(
                            index=len(out),
                            alpha=alpha,
                            gamma=self.gamma_for(alpha),
                            looks=looks,
                            n=n,
                            replications=self.replication_rule.replications(n),
                        )
                    )
        return out

    def known_for(self, cell: Cell) -> float | None:
        if self.regime is Regime.ALPHA_ONLY:
            return cell.gamma
        if self.regime is Regime.GAMMA_ONLY:
            return cell.alpha
        return None

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "study": self.study.value,
            "alphas": list(self.alphas),
            "looks_set": list(self.looks_set),
            "sample_sizes": list(self.sample_sizes),
            "replication_rule": self.replication_rule.to_dict(),
            "seed": self.seed,
            "regime": self.regime.value,
            "statistics": [s.value for s in self.statistics],
            "gamma": self.gamma,
            "eta": self.eta,
            "perm": self.perm,
            "box_factor": self.box_factor,
            "thresholds": list(self.thresholds),
            "metric_alpha": self.metric_alpha.value,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ExperimentPlan:
        data = dict(data)
        try:
            for key in ("alphas", "looks_set", "thresholds", "statistics"):
                if key in data:
                    data[key] = tuple(data[key])
            if "sample_sizes" in data:
                data["sample_sizes"] = tuple(int(n) for n in data["sample_sizes"])
            return cls(**data)
        except (TypeError, ValueError, DomainError) as e:
            raise ConfigurationError(f"Invalid experiment plan: {e}")


def load_plan(
    path: Path, seed: int | None = None, fallback_seed: int | None = None
) -> ExperimentPlan:
    """Read a plan from JSON or TOML.

    ``seed`` overrides the file's seed; ``fallback_seed`` applies when neither is set.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigurationError(f"Could not read plan {path}: {e}")
    try:
        if path.suffix.lower() == ".toml":
            data = json.loads(json.dumps(dict(tomlkit.parse(text))))
        else:
            data = json.loads(text)
    except Exception as e:
        raise ConfigurationError(f"Could not parse plan {path}: {e}")
    if seed is not None:
        data["seed"] = seed
    if "seed" not in data and fallback_seed is not None:
        data["seed"] = fallback_seed
    if "seed" not in data:
        raise ConfigurationError(f"Plan {path} has no seed")
    return ExperimentPlan.from_dict(data)


@dataclass
class CellRecord:
    """Counts and summary tables of one cell."""

    cell: Cell
    planned: int
    feasible: int = 0
    infeasible: int = 0
    failed: int = 0
    tables: dict[str, list[dict[str, Any]]] = field(default_factory=dict)

    def add_rows(self, table: str, rows: Iterable[dict[str, Any]]) -> None:
        self.tables.setdefault(table, []).extend({**self.cell.key(), **r} for r in rows)

    def counts(self) -> dict[str, Any]:
        return {
            **self.cell.key(),
            "planned": self.planned,
            "feasible": self.feasible,
            "infeasible": self.infeasible,
            "failed": self.failed,
        }


@dataclass
class ExperimentReport:
    plan: ExperimentPlan
    records: list[CellRecord]
    elapsed: float = 0.0

    def tables(self) -> dict[str, pd.DataFrame]:
        out: dict[str, pd.DataFrame] = {"cells": pd.DataFrame([r.counts() for r in self.records])}
        names: list[str] = []
        for r in self.records:
            names.extend(n for n in r.tables if n not in names)
        for name in names:
            rows = [row for r in self.records for row in r.tables.get(name, [])]
            out[name] = pd.DataFrame(rows)
        return out

    def table(self, name: str) -> pd.DataFrame:
        return self.tables()[name]


# Per-replication work


@dataclass(frozen=True)
class _Outcome:
    status: str
    values: dict[str, float] = field(default_factory=dict)


def _fit_both_samples(
    plan: ExperimentPlan, cell: Cell, rng: np.random.Generator, options: FitOptions
) -> tuple[FitResult, FitResult, NDArray[np.float64], NDArray[np.float64]]:
    params = cell.params
    x1 = draw(params, cell.n, rng)
    x2 = draw(params, cell.n, rng)
    box = FeasibilityBox.around(params, plan.box_factor)
    known = plan.known_for(cell)
    f1 = fit(x1, cell.looks, plan.regime, known=known, box=box, options=options)
    f2 = fit(x2, cell.looks, plan.regime, known=known, box=box, options=options)
    if not (f1.feasible and f2.feasible):
        raise InfeasibleFitError("estimates outside the box")
    return f1, f2, x1, x2


def _raw_statistics(
    plan: ExperimentPlan, cell: Cell, f1: FitResult, f2: FitResult, kinds: Iterable[Statistic]
) -> dict[str, float]:
    known_alpha = cell.alpha if plan.regime is Regime.GAMMA_ONLY else None
    out = {}
    for kind in kinds:
        try:
            out[kind.value] = statistic_value(
                kind, f1, f2, cell.n, cell.n, cell.looks, plan.metric_alpha, known_alpha
            )
        except NumericalError:
            out[kind.value] = math.nan
    return out


def _estimator_replicate(plan: ExperimentPlan, cell: Cell, r: int, options: FitOptions) -> _Outcome:
    rng = derive_rng(plan.seed, cell.index, r)
    try:
        f1, f2, _, _ = _fit_both_samples(plan, cell, rng, options)
    except InfeasibleFitError:
        return _Outcome(INFEASIBLE)
    except NumericalError:
        return _Outcome(FAILED)
    values = {"alpha1": f1.alpha, "gamma1": f1.gamma, "alpha2": f2.alpha, "gamma2": f2.gamma}
    values.update(_raw_statistics(plan, cell, f1, f2, plan.statistics))
    return _Outcome(FEASIBLE, values)


def _size_replicate(plan: ExperimentPlan, cell: Cell, r: int, options: FitOptions) -> _Outcome:
    rng = derive_rng(plan.seed, cell.index, r)
    composite = tuple(s for s in plan.statistics if s.composite)
    simple = tuple(s for s in plan.statistics if not s.composite)
    try:
        f1, f2, x1, x2 = _fit_both_samples(plan, cell, rng, options)
    except InfeasibleFitError:
        return _Outcome(INFEASIBLE)
    except NumericalError:
        return _Outcome(FAILED)

    values: dict[str, float] = {}
    for kind, t in _raw_statistics(plan, cell, f1, f2, simple).items():
        values[f"p_{kind}"] = p_value_chi2(t) if math.isfinite(t) else math.nan

    if composite:
        cfg = PermutationConfig(
            perm=plan.perm,
            eta=plan.eta,
            seed=int(rng.integers(2**62)),
            kind=composite[0],
            on_fit_failure=FitFailurePolicy.SKIP,
            metric_alpha=plan.metric_alpha,
            threads=1,
            fit_options=options,
        )
        box = FeasibilityBox.around(cell.params, plan.box_factor)
        try:
            results = permutation_test_many(x1, x2, cell.looks, cfg, composite, Regime.BOTH, None, box)
        except NumericalError:
            return _Outcome(FAILED)
        for kind, res in results.items():
            values[f"p_{kind.value}"] = res.p_value
    return _Outcome(FEASIBLE, values)


def _joint_replicate(plan: ExperimentPlan, cell: Cell, r: int, options: FitOptions) -> _Outcome:
    rng = derive_rng(plan.seed, cell.index, r)
    try:
        f1, f2, _, _ = _fit_both_samples(plan, cell, rng, options)
    except InfeasibleFitError:
        return _Outcome(INFEASIBLE)
    except NumericalError:
        return _Outcome(FAILED)
    values = {"alpha1": f1.alpha, "gamma1": f1.gamma, "alpha2": f2.alpha, "gamma2": f2.gamma}
    values.update(
        _raw_statistics(plan, cell, f1, f2, (Statistic.T_ALPHA, Statistic.T_GAMMA))
    )
    return _Outcome(FEASIBLE, values)


# Summaries


def five_number(values: NDArray[np.float64]) -> dict[str, float]:
    q = np.quantile(values, [0.0, 0.25, 0.5, 0.75, 1.0])
    return {"min": q[0], "q25": q[1], "median": q[2], "q75": q[3], "max": q[4], "iqr": q[3] - q[1]}


def fd_histogram(values: NDArray[np.float64]) -> list[dict[str, float]]:
    """Density histogram with Freedman-Diaconis bins."""
    values = values[np.isfinite(values)]
    if values.size == 0:
        return []
    density, edges = np.histogram(values, bins="fd", density=True)
    return [
        {"bin_lo": lo, "bin_hi": hi, "density": d}
        for lo, hi, d in zip(edges[:-1], edges[1:], density)
    ]


def histogram_2d(x: NDArray[np.float64], y: NDArray[np.float64]) -> list[dict[str, float]]:
    """Counts on a grid whose axes use Freedman-Diaconis bins, for contour plots."""
    ok = np.isfinite(x) & np.isfinite(y)
    x, y = x[ok], y[ok]
    if x.size < 2:
        return []
    x_edges = np.histogram_bin_edges(x, bins="fd")
    y_edges = np.histogram_bin_edges(y, bins="fd")
    counts, _, _ = np.histogram2d(x, y, bins=[x_edges, y_edges])
    rows = []
    for i in range(counts.shape[0]):
        for j in range(counts.shape[1]):
            rows.append(
                {
                    "x_lo": x_edges[i],
                    "x_hi": x_edges[i + 1],
                    "y_lo": y_edges[j],
                    "y_hi": y_edges[j + 1],
                    "count": int(counts[i, j]),
                }
            )
    return rows


def correlation(x: NDArray[np.float64], y: NDArray[np.float64]) -> float:
    ok = np.isfinite(x) & np.isfinite(y)
    if ok.sum() < 3 or np.ptp(x[ok]) == 0 or np.ptp(y[ok]) == 0:
        return math.nan
    return float(np.corrcoef(x[ok], y[ok])[0, 1])


def _column(outcomes: list[_Outcome], key: str) -> NDArray[np.float64]:
    return np.array([o.values.get(key, math.nan) for o in outcomes], dtype=np.float64)


def _free_parameters(regime: Regime) -> tuple[str, ...]:
    if regime is Regime.ALPHA_ONLY:
        return ("alpha",)
    if regime is Regime.GAMMA_ONLY:
        return ("gamma",)
    return ("alpha", "gamma")


def _summarise_estimator(plan: ExperimentPlan, record: CellRecord, kept: list[_Outcome]) -> None:
    cell = record.cell
    truth = {"alpha": cell.alpha, "gamma": cell.gamma}
    for name in _free_parameters(plan.regime):
        est = np.concatenate([_column(kept, f"{name}1"), _column(kept, f"{name}2")])
        if est.size == 0:
            continue
        err = np.abs(est - truth[name])
        record.add_rows(
            "estimator_summary",
            [
                {
                    "parameter": name,
                    "true": truth[name],
                    "count": int(est.size),
                    "mean": float(np.mean(est)),
                    "bias": float(np.mean(est) - truth[name]),
                    "sd": float(np.std(est, ddof=1)) if est.size > 1 else math.nan,
                    **five_number(est),
                }
            ],
        )
        record.add_rows(
            "error_proportions",
            [
                {"parameter": name, "threshold": tau, "proportion": float(np.mean(err > tau))}
                for tau in plan.thresholds
            ],
        )
        record.add_rows(
            "estimator_density",
            [{"parameter": name, **row} for row in fd_histogram(est)],
        )

    cut = chi2_cutoff(plan.eta)
    for kind in plan.statistics:
        t = _column(kept, kind.value)
        t = t[np.isfinite(t)]
        if t.size == 0:
            continue
        row: dict[str, Any] = {
            "statistic": kind.value,
            "count": int(t.size),
            **five_number(t),
            "q95": float(np.quantile(t, 0.95)),
            "cut": cut,
        }
        if not kind.composite:
            size = float(np.mean(t > cut))
            row["empirical_size"] = size
            row["relative_deviation"] = abs(size - plan.eta) / plan.eta
        record.add_rows("statistic_summary", [row])
        record.add_rows(
            "statistic_density",
            [{"statistic": kind.value, **row} for row in fd_histogram(t)],
        )


def _summarise_size(plan: ExperimentPlan, record: CellRecord, kept: list[_Outcome]) -> None:
    for kind in plan.statistics:
        p = _column(kept, f"p_{kind.value}")
        p = p[np.isfinite(p)]
        count = int(p.size)
        rejections = int(np.count_nonzero(p < plan.eta))
        rate = rejections / count if count else math.nan
        se = math.sqrt(rate * (1 - rate) / count) if count else math.nan
        record.add_rows(
            "empirical_size",
            [
                {
                    "statistic": kind.value,
                    "calibration": "Permutation" if kind.composite else "Chi2Asymptotic",
                    "eta": plan.eta,
                    "count": count,
                    "rejections": rejections,
                    "empirical_size": rate,
                    "false_negative_rate": rate,
                    "se": se,
                    "relative_deviation": abs(rate - plan.eta) / plan.eta if count else math.nan,
                }
            ],
        )
        record.add_rows(
            "pvalue_uniformity",
            [
                {
                    "statistic": kind.value,
                    "level": level,
                    "fraction_below": float(np.mean(p < level)) if count else math.nan,
                    "band": 3 * math.sqrt(level * (1 - level) / count) if count else math.nan,
                }
                for level in UNIFORMITY_LEVELS
            ],
        )


def _summarise_joint(plan: ExperimentPlan, record: CellRecord, kept: list[_Outcome]) -> None:
    a1, g1 = _column(kept, "alpha1"), _column(kept, "gamma1")
    g2 = _column(kept, "gamma2")
    ta, tg = _column(kept, Statistic.T_ALPHA.value), _column(kept, Statistic.T_GAMMA.value)
    count = len(kept)
    threshold = 3 / math.sqrt(count) if count else math.nan
    rows = []
    for pair, x, y in (
        ("alpha_hat,gamma_hat", a1, g1),
        ("T_alpha,T_gamma", ta, tg),
        ("alpha_hat1,gamma_hat2 (control)", a1, g2),
    ):
        rho = correlation(x, y)
        rows.append(
            {
                "pair": pair,
                "count": count,
                "correlation": rho,
                "threshold": threshold,
                "significant": bool(abs(rho) > threshold) if math.isfinite(rho) else False,
            }
        )
    record.add_rows("joint_correlation", rows)
    record.add_rows("joint_histogram_estimates", histogram_2d(a1, g1))
    record.add_rows("joint_histogram_statistics", histogram_2d(ta, tg))


_REPLICATE: dict[Study, Callable[[ExperimentPlan, Cell, int, FitOptions], _Outcome]] = {
    Study.ESTIMATOR: _estimator_replicate,
    Study.SIZE: _size_replicate,
    Study.JOINT: _joint_replicate,
}

_SUMMARISE: dict[Study, Callable[[ExperimentPlan, CellRecord, list[_Outcome]], None]] = {
    Study.ESTIMATOR: _summarise_estimator,
    Study.SIZE: _summarise_size,
    Study.JOINT: _summarise_joint,
}


def _run(
    plan: ExperimentPlan,
    study: Study,
    threads: int,
    options: FitOptions | None,
    progress: bool,
) -> ExperimentReport:
    if plan.study is not study:
        raise ConfigurationError(f"Plan '{plan.name}' is a {plan.study.value} study, not {study.value}")
    options = options or FitOptions()
    replicate = _REPLICATE[study]
    summarise = _SUMMARISE[study]
    cells = plan.cells()
    started = time.perf_counter()
    records: list[CellRecord] = []

    with Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        TextColumn("[progress.percentage]{task.percentage:>3.0f}%"),
        TextColumn("({task.completed}/{task.total})"),
        disable=not progress,
    ) as bar, ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        for cell in cells:
            logger.info(
                f"Cell {cell.index + 1}/{len(cells)}: alpha={cell.alpha}, L={cell.looks}, "
                f"n={cell.n}, R={cell.replications}"
            )
            task = bar.add_task(
                f"[cyan]{study.value} alpha={cell.alpha:g} L={cell.looks:g} n={cell.n}[/cyan]",
                total=cell.replications,
            )

            def work(r: int, cell: Cell = cell) -> _Outcome:
                outcome = replicate(plan, cell, r, options)
                bar.update(task, advance=1)
                return outcome

            outcomes = list(executor.map(work, range(cell.replications)))
            record = CellRecord(cell=cell, planned=cell.replications)
            for o in outcomes:
                if o.status == FEASIBLE:
                    record.feasible += 1
                elif o.status == INFEASIBLE:
                    record.infeasible += 1
                else:
                    record.failed += 1
            summarise(plan, record, [o for o in outcomes if o.status == FEASIBLE])
            records.append(record)
            logger.debug(f"Cell {cell.index}: {record.counts()}")

    return ExperimentReport(plan=plan, records=records, elapsed=time.perf_counter() - started)


def run_estimator_study(
    plan: ExperimentPlan, threads: int = 1, options: FitOptions | None = None, progress: bool = False
) -> ExperimentReport:
    """Estimator densities, error proportions and one-parameter statistic summaries."""
    return _run(plan, Study.ESTIMATOR, threads, options, progress)


def run_size_study(
    plan: ExperimentPlan, threads: int = 1, options: FitOptions | None = None, progress: bool = False
) -> ExperimentReport:
    """Rejection rates under the null hypothesis (chi-square or permutation calibrated)."""
    return _run(plan, Study.SIZE, threads, options, progress)


def run_joint_dependence_study(
    plan: ExperimentPlan, threads: int = 1, options: FitOptions | None = None, progress: bool = False
) -> ExperimentReport:
    """Correlation of (alpha_hat, gamma_hat) and of (T_alpha, T_gamma), with 2-D histograms."""
    return _run(plan, Study.JOINT, threads, options, progress)


def run_plan(
    plan: ExperimentPlan, threads: int = 1, options: FitOptions | None = None, progress: bool = False
) -> ExperimentReport:
    return _run(plan, plan.study, threads, options, progress)


def write_report(report: ExperimentReport, out_dir: Path) -> list[Path]:
    """Write one CSV per table plus the plan; returns the written paths."""
    out_dir = Path(out_dir)
    ensure_directory(out_dir)
    written = []
    for name, frame in report.tables().items():
        written.append(atomic_write_text(out_dir / f"{name}.csv", frame.to_csv(index=False)))
    plan_text = json.dumps(report.plan.to_dict(), indent=2) + "\n"
    written.append(atomic_write_text(out_dir / "plan.json", plan_text))
    return written


def plan_summary(plan: ExperimentPlan) -> dict[str, Any]:
    cells = plan.cells()
    return {
        **plan.to_dict(),
        "cells": len(cells),
        "replications": sum(c.replications for c in cells),
        "volume": sum(c.n * c.replications for c in cells),
    }


__all__ = [
    "Budget",
    "Cell",
    "CellRecord",
    "ExperimentPlan",
    "ExperimentReport",
    "Fixed",
    "Study",
    "load_plan",
    "run_estimator_study",
    "run_joint_dependence_study",
    "run_plan",
    "run_size_study",
    "write_report",
]
