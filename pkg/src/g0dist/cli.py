"""
CLI interface for g0dist - G0 speckle models, geodesic tests and edge detection.
"""

from __future__ import annotations

import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, NoReturn

import click
import numpy as np
import pandas as pd
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table
from rich.traceback import install

from . import __version__
from .config import Settings, load_settings
from .edge import detect_edges, two_region_strip, write_edges, write_profiles
from .exceptions import G0Error, NumericalError
from .geodesic import BRANCH_SCALE, Distance, dist_gamma, texture_distance
from .imageio import read_strip, write_raw
from .manifest import RunManifest, manifest_path, package_versions
from .mc import load_plan, plan_summary, run_plan, write_report
from .mle import FeasibilityBox, FitOptions, Regime, fit
from .model import G0Params, format_sample, read_sample, sample, write_sample
from .perm import PermutationConfig, two_sample_test
from .presets import PRESETS, TEMPLATES, build_plan
from .stats import Calibration, MetricAlpha, Statistic
from .utils import atomic_write_text, fresh_seed

install(show_locals=True)

logger = logging.getLogger(__name__)

# data goes to stdout, everything else to stderr
console = Console(stderr=True)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NUMERICAL = 2

STATISTIC_CHOICES = ["Talpha", "Tgamma", "T1", "T2", "T3"]
CELL_COLUMNS = ("alpha", "looks", "n", "planned", "feasible", "infeasible", "failed")


def setup_logging(verbose: bool = False) -> None:
    """Setup rich logging with appropriate level."""
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=console, rich_tracebacks=True)],
    )


class G0Group(click.Group):
    """Click group whose usage errors exit with status 1."""

    def main(self, *args: Any, standalone_mode: bool = True, **kwargs: Any) -> Any:
        if not standalone_mode:
            return super().main(*args, standalone_mode=False, **kwargs)
        try:
            rv = super().main(*args, standalone_mode=False, **kwargs)
        except click.ClickException as e:
            e.show()
            sys.exit(EXIT_ERROR)
        except click.Abort:
            console.print("[yellow]Aborted[/yellow]")
            sys.exit(EXIT_ERROR)
        sys.exit(rv if isinstance(rv, int) else EXIT_OK)


@dataclass
class RunContext:
    settings: Settings
    sources: list[str]
    ci: bool

    def seed(self, seed: int | None) -> int:
        """The given seed, or fresh entropy outside CI mode."""
        if seed is not None:
            return seed
        if self.ci:
            raise click.UsageError("--seed is required in CI mode (--ci)")
        seed = fresh_seed()
        console.print(f"[blue]Using seed {seed}[/blue]")
        return seed

    def fit_options(self) -> FitOptions:
        s = self.settings
        return FitOptions(gradient=s.gradient, max_iter=s.max_iter, gtol=s.gtol)


def _fail(action: str, error: Exception) -> NoReturn:
    if isinstance(error, NumericalError):
        click.echo(json.dumps({"error": type(error).__name__, "message": str(error)}))
        console.print(f"[bold red]{action} failed:[/bold red] {error}")
        sys.exit(EXIT_NUMERICAL)
    if isinstance(error, G0Error):
        console.print(f"[bold red]{action} failed:[/bold red] {error}")
        sys.exit(EXIT_ERROR)
    console.print(f"[bold red]Unexpected error:[/bold red] {error}")
    if logging.getLogger().level <= logging.DEBUG:
        console.print_exception()
    sys.exit(EXIT_ERROR)


def _json_default(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"Cannot serialize {type(value).__name__}")


def _render(record: dict[str, Any], fmt: str) -> str:
    """JSON for single results; ``csv`` flattens the record into a one-row table."""
    if fmt == "csv":
        return pd.json_normalize([record], sep="_").to_csv(index=False)
    return json.dumps(record, indent=2, default=_json_default) + "\n"


def _emit(
    manifest: RunManifest, text: str, out: Path | None, extra: list[Path] | None = None
) -> None:
    """Write ``text`` to ``out`` (plus its manifest) or print it to stdout."""
    extra = extra or []
    if out is None:
        click.echo(text, nl=False)
        if not extra:
            return
        anchor = extra[0]
    else:
        anchor = atomic_write_text(out, text)
        manifest.add_outputs([anchor])
    manifest.add_outputs(extra)
    manifest.write(manifest_path(anchor))
    console.print(f"[bold green]Wrote {', '.join(manifest.outputs)}[/bold green]")


def _manifest(ctx: click.Context, command: str, seed: int | None = None, **parameters: Any) -> RunManifest:
    state: RunContext = ctx.obj
    return RunManifest(
        command=command,
        seed=seed,
        settings=state.settings.to_dict(),
        parameters={k: v for k, v in parameters.items() if v is not None},
    )


@click.group(cls=G0Group, invoke_without_command=True)
@click.option("--verbose", "-v", is_flag=True, help="Enable verbose logging")
@click.option("--version", is_flag=True, help="Show version and exit")
@click.option(
    "--threads",
    type=click.IntRange(min=0),
    default=None,
    help="Worker threads (0 = all cores); fits share the GIL, so the speedup is modest",
)
@click.option("--ci", is_flag=True, help="CI mode: seeds are mandatory for random commands")
@click.option(
    "--config",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="Settings file (defaults to g0dist.toml in the project root)",
)
@click.pass_context
def cli(
    ctx: click.Context,
    verbose: bool,
    version: bool,
    threads: int | None,
    ci: bool,
    config: Path | None,
) -> None:
    """
    g0dist - Geodesic tests for G0-distributed SAR intensity data

    Simulate and fit G0 speckle models, compare samples with geodesic-distance
    statistics, run Monte Carlo studies and detect edges along image rows.
    """
    setup_logging(verbose)

    if version:
        console.print(
            f"[bold blue]g0dist[/bold blue] version [bold green]{__version__}[/bold green]"
        )
        sys.exit(EXIT_OK)

    try:
        settings, sources = load_settings(config_path=config)
        if threads is not None:
            settings = settings.merged({"threads": threads})
            sources.append("--threads")
    except G0Error as e:
        console.print(f"[bold red]Configuration failed:[/bold red] {e}")
        sys.exit(EXIT_ERROR)
    ctx.obj = RunContext(settings=settings, sources=sources, ci=ci)

    if ctx.invoked_subcommand is None:
        console.print(ctx.get_help())


@cli.command("sample")
@click.option("--alpha", type=float, required=True, help="Texture parameter (< 0)")
@click.option("--gamma", type=float, required=True, help="Scale parameter (> 0)")
@click.option("--looks", type=float, default=1.0, show_default=True, help="Number of looks")
@click.option("--n", "n", type=click.IntRange(min=1), required=True, help="Sample size")
@click.option("--seed", type=click.IntRange(min=0), default=None, help="Random seed")
@click.option("--label", default=None, help="Label stored in the sidecar")
@click.option("--out", "-o", type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.option("--format", "fmt", type=click.Choice(["csv", "text"]), default="csv", show_default=True)
@click.pass_context
def sample_cmd(
    ctx: click.Context,
    alpha: float,
    gamma: float,
    looks: float,
    n: int,
    seed: int | None,
    label: str | None,
    out: Path | None,
    fmt: str,
) -> None:
    """
    Draw a G0(alpha, gamma, L) sample

    Prints one value per line, or writes the file with a JSON sidecar and a manifest.
    """
    try:
        state: RunContext = ctx.obj
        seed = state.seed(seed)
        z = sample(G0Params(alpha, gamma, looks), n, seed, label=label)
        if out is None:
            click.echo(format_sample(z, fmt), nl=False)
            return
        manifest = _manifest(ctx, "sample", seed, alpha=alpha, gamma=gamma, looks=looks, n=n)
        manifest.add_outputs(write_sample(z, out, fmt))
        manifest.write(manifest_path(out))
        console.print(f"[bold green]Wrote {n} values to {out}[/bold green]")
    except (click.ClickException, click.exceptions.Exit):
        raise
    except Exception as e:
        _fail("Sampling", e)


def _known(regime: Regime, alpha_known: float | None, gamma_known: float | None) -> float | None:
    if regime is Regime.ALPHA_ONLY:
        if gamma_known is None:
            raise click.UsageError("--regime alpha needs --gamma-known")
        return gamma_known
    if regime is Regime.GAMMA_ONLY:
        if alpha_known is None:
            raise click.UsageError("--regime gamma needs --alpha-known")
        return alpha_known
    if alpha_known is not None or gamma_known is not None:
        raise click.UsageError("--regime both estimates both parameters; drop the known values")
    return None


@cli.command("fit")
@click.argument("sample_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--looks", type=float, required=True, help="Number of looks")
@click.option(
    "--regime",
    type=click.Choice(["both", "alpha", "gamma"], case_sensitive=False),
    default="both",
    show_default=True,
    help="Which parameters to estimate",
)
@click.option("--alpha-known", type=float, default=None, help="Known alpha (regime gamma)")
@click.option("--gamma-known", type=float, default=None, help="Known gamma (regime alpha)")
@click.option(
    "--box",
    type=float,
    nargs=4,
    default=None,
    metavar="A_LO A_HI G_LO G_HI",
    help="Feasibility box [A_LO, A_HI) x (G_LO, G_HI]",
)
@click.option("--out", "-o", type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@click.pass_context
def fit_cmd(
    ctx: click.Context,
    sample_file: Path,
    looks: float,
    regime: str,
    alpha_known: float | None,
    gamma_known: float | None,
    box: tuple[float, float, float, float] | None,
    out: Path | None,
    fmt: str,
) -> None:
    """
    Maximum-likelihood fit of a sample

    Reports the estimates, the log-likelihood and whether they fall inside the box.
    """
    try:
        state: RunContext = ctx.obj
        parsed = Regime.parse(regime)
        known = _known(parsed, alpha_known, gamma_known)
        z = read_sample(sample_file)
        fit_box = FeasibilityBox(*box) if box else FeasibilityBox.for_data(z)
        result = fit(z, looks, parsed, known=known, box=fit_box, options=state.fit_options())
        if not result.feasible:
            logger.warning("The estimates lie outside the feasibility box")
        record = {"sample": z.label, "n": len(z), **result.to_dict(), "box": fit_box.to_dict()}
        manifest = _manifest(ctx, "fit", looks=looks, regime=parsed.value, known=known)
        manifest.add_input(sample_file)
        _emit(manifest, _render(record, fmt), out)
    except (click.ClickException, click.exceptions.Exit):
        raise
    except Exception as e:
        _fail("Fit", e)


@cli.command("distance")
@click.option("--alpha1", type=float, default=None)
@click.option("--alpha2", type=float, default=None)
@click.option("--gamma1", type=float, default=None)
@click.option("--gamma2", type=float, default=None)
@click.option("--alpha", type=float, default=None, help="Texture fixed in the scale metric")
@click.option("--looks", type=float, required=True, help="Number of looks")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@click.pass_context
def distance_cmd(
    ctx: click.Context,
    alpha1: float | None,
    alpha2: float | None,
    gamma1: float | None,
    gamma2: float | None,
    alpha: float | None,
    looks: float,
    fmt: str,
) -> None:
    """
    Geodesic distance between two G0 models

    Give --alpha1/--alpha2 for the texture distance, or --gamma1/--gamma2 with --alpha
    for the scale distance.
    """
    texture = alpha1 is not None and alpha2 is not None
    scale = gamma1 is not None and gamma2 is not None and alpha is not None
    if texture == scale:
        raise click.UsageError(
            "Give either --alpha1 and --alpha2, or --gamma1, --gamma2 and --alpha"
        )
    try:
        state: RunContext = ctx.obj
        if texture:
            assert alpha1 is not None and alpha2 is not None
            d = texture_distance(alpha1, alpha2, looks, tol=state.settings.quadrature_tol)
        else:
            assert gamma1 is not None and gamma2 is not None and alpha is not None
            d = Distance(dist_gamma(gamma1, gamma2, alpha, looks), BRANCH_SCALE)
        click.echo(_render(d.to_dict(), fmt), nl=False)
    except Exception as e:
        _fail("Distance", e)


@cli.command("test")
@click.argument("sample1", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.argument("sample2", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option(
    "--stat",
    type=click.Choice(STATISTIC_CHOICES, case_sensitive=False),
    required=True,
    help="Test statistic",
)
@click.option("--looks", type=float, required=True, help="Number of looks")
@click.option("--alpha-known", type=float, default=None, help="Known alpha (for Tgamma)")
@click.option("--gamma-known", type=float, default=None, help="Known gamma (for Talpha)")
@click.option(
    "--calibration",
    type=click.Choice(["chi2", "permutation"]),
    default=None,
    help="Null distribution (chi2 for Talpha/Tgamma, permutation for T1-T3 by default)",
)
@click.option("--perm", type=click.IntRange(min=1), default=None, help="Permutation replicates")
@click.option("--eta", type=float, default=None, help="Significance level")
@click.option("--seed", type=click.IntRange(min=0), default=None, help="Permutation seed")
@click.option(
    "--metric-alpha",
    type=click.Choice([m.value for m in MetricAlpha]),
    default=None,
    help="Texture used by the scale metric",
)
@click.option(
    "--dump-permuted",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Write the permuted statistic values to this CSV",
)
@click.option("--out", "-o", type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@click.pass_context
def test_cmd(
    ctx: click.Context,
    sample1: Path,
    sample2: Path,
    stat: str,
    looks: float,
    alpha_known: float | None,
    gamma_known: float | None,
    calibration: str | None,
    perm: int | None,
    eta: float | None,
    seed: int | None,
    metric_alpha: str | None,
    dump_permuted: Path | None,
    out: Path | None,
    fmt: str,
) -> None:
    """
    Two-sample test of equal G0 laws

    Fits both samples, computes the statistic and calibrates it against the
    chi-square reference or a permutation distribution.
    """
    try:
        state: RunContext = ctx.obj
        kind = Statistic.parse(stat)
        calib = None
        if calibration is not None:
            calib = Calibration.CHI2 if calibration == "chi2" else Calibration.PERMUTATION
        permuting = calib is Calibration.PERMUTATION or (calib is None and kind.composite)
        if dump_permuted is not None and not permuting:
            raise click.UsageError("--dump-permuted needs permutation calibration")
        run_seed = state.seed(seed) if permuting else seed
        cfg = PermutationConfig.from_settings(
            state.settings,
            run_seed or 0,
            kind=kind,
            perm=perm,
            eta=eta,
            metric_alpha=metric_alpha,
        )
        z1, z2 = read_sample(sample1), read_sample(sample2)
        outcome, result = two_sample_test(
            z1, z2, looks, kind, calib, known_alpha=alpha_known, known_gamma=gamma_known, cfg=cfg
        )
        extra = [result.dump_permuted(dump_permuted)] if result is not None and dump_permuted else []

        manifest = _manifest(
            ctx,
            "test",
            run_seed,
            statistic=kind.value,
            looks=looks,
            calibration=outcome.calibration.value,
            alpha_known=alpha_known,
            gamma_known=gamma_known,
        )
        manifest.add_input(sample1)
        manifest.add_input(sample2)
        _emit(manifest, _render(outcome.to_dict(), fmt), out, extra)
        verdict = "rejected" if outcome.rejected else "not rejected"
        console.print(f"{kind.value} = {outcome.value:.6g}, p = {outcome.p_value:.4g} ({verdict})")
    except (click.ClickException, click.exceptions.Exit):
        raise
    except Exception as e:
        _fail("Test", e)


@cli.command("mc")
@click.option(
    "--plan",
    "plan_file",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="Experiment plan (JSON or TOML)",
)
@click.option(
    "--experiment",
    type=click.Choice(list(TEMPLATES.keys())),
    default=None,
    help="Named experiment template",
)
@click.option(
    "--preset",
    type=click.Choice(list(PRESETS.keys())),
    default="quick",
    show_default=True,
    help="Budget for --experiment",
)
@click.option("--out", "-o", type=click.Path(file_okay=False, path_type=Path), required=True)
@click.option("--seed", type=click.IntRange(min=0), default=None, help="Master seed")
@click.option("--dry-run", is_flag=True, help="Show the plan without running it")
@click.pass_context
def mc_cmd(
    ctx: click.Context,
    plan_file: Path | None,
    experiment: str | None,
    preset: str,
    out: Path,
    seed: int | None,
    dry_run: bool,
) -> None:
    """
    Run a Monte Carlo study

    Writes one CSV per summary table, the plan and a manifest into the output directory.
    """
    if (plan_file is None) == (experiment is None):
        raise click.UsageError("Give exactly one of --plan or --experiment")
    try:
        state: RunContext = ctx.obj
        if plan_file is not None:
            fallback = None if state.ci else fresh_seed()
            plan = load_plan(plan_file, seed=seed, fallback_seed=fallback)
        else:
            assert experiment is not None
            plan = build_plan(experiment, preset, state.seed(seed))

        summary = plan_summary(plan)
        console.print(
            f"[blue]{plan.name}: {summary['cells']} cells, {summary['replications']} replications, "
            f"seed {plan.seed}[/blue]"
        )
        if dry_run:
            click.echo(json.dumps(summary, indent=2))
            return

        report = run_plan(
            plan, threads=state.settings.worker_count, options=state.fit_options(), progress=True
        )
        written = write_report(report, out)

        table = Table(title=f"{plan.name} ({report.elapsed:.1f}s)")
        for column in CELL_COLUMNS:
            table.add_column(column, justify="right")
        for record in report.records:
            counts = record.counts()
            table.add_row(*(f"{counts[k]:g}" for k in CELL_COLUMNS))
        console.print(table)

        manifest = _manifest(ctx, "mc", plan.seed, plan=plan.name, preset=preset if experiment else None)
        if plan_file is not None:
            manifest.add_input(plan_file)
        manifest.add_outputs(written)
        manifest.write(manifest_path(out))
        console.print(f"[bold green]Report written to {out}[/bold green]")
    except (click.ClickException, click.exceptions.Exit):
        raise
    except Exception as e:
        _fail("Monte Carlo run", e)


@cli.command("edges")
@click.option("--image", type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
@click.option("--sidecar", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None)
@click.option(
    "--stat",
    type=click.Choice(STATISTIC_CHOICES, case_sensitive=False),
    default="T1",
    show_default=True,
)
@click.option("--perm", type=click.IntRange(min=1), default=None, help="Permutation replicates")
@click.option("--eta", type=float, default=None, help="Significance level")
@click.option("--seed", type=click.IntRange(min=0), default=None, help="Master seed")
@click.option("--looks", type=float, default=None, help="Override the number of looks")
@click.option(
    "--profiles",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Also write the p-value profile of every row",
)
@click.option("--out", "-o", type=click.Path(dir_okay=False, path_type=Path), required=True)
@click.pass_context
def edges_cmd(
    ctx: click.Context,
    image: Path,
    sidecar: Path | None,
    stat: str,
    perm: int | None,
    eta: float | None,
    seed: int | None,
    looks: float | None,
    profiles: Path | None,
    out: Path,
) -> None:
    """
    Detect one edge per image row

    Every split of a row is tested; the edge is the split with the smallest p-value.
    """
    try:
        state: RunContext = ctx.obj
        run_seed = state.seed(seed)
        strip = read_strip(image, sidecar, looks)
        kind = Statistic.parse(stat)
        cfg = PermutationConfig.from_settings(state.settings, run_seed, kind=kind, perm=perm, eta=eta)
        console.print(
            f"[blue]Scanning {strip.rows} rows x {strip.cols} cols with {kind.value}, "
            f"{cfg.perm} permutations per split[/blue]"
        )
        result = detect_edges(strip, kind, cfg, progress=True)

        manifest = _manifest(ctx, "edges", run_seed, statistic=kind.value, perm=cfg.perm, looks=strip.looks)
        manifest.add_input(image)
        manifest.add_outputs([write_edges(result, out)])
        if profiles is not None:
            manifest.add_outputs([write_profiles(result, profiles)])
        manifest.write(manifest_path(out))
        console.print(f"[bold green]Edges written to {out}[/bold green]")
    except (click.ClickException, click.exceptions.Exit):
        raise
    except Exception as e:
        _fail("Edge detection", e)


@cli.command("strip")
@click.option("--rows", type=click.IntRange(min=1), required=True)
@click.option("--cols", type=click.IntRange(min=7), required=True)
@click.option("--edge-col", type=int, required=True, help="Pixels in the left region")
@click.option("--left", type=float, nargs=2, required=True, metavar="ALPHA GAMMA")
@click.option("--right", type=float, nargs=2, required=True, metavar="ALPHA GAMMA")
@click.option("--looks", type=float, default=1.0, show_default=True)
@click.option("--seed", type=click.IntRange(min=0), default=None)
@click.option("--out", "-o", type=click.Path(dir_okay=False, path_type=Path), required=True)
@click.pass_context
def strip_cmd(
    ctx: click.Context,
    rows: int,
    cols: int,
    edge_col: int,
    left: tuple[float, float],
    right: tuple[float, float],
    looks: float,
    seed: int | None,
    out: Path,
) -> None:
    """
    Simulate a two-region strip for edge detection

    Writes a little-endian float32 raster and its JSON sidecar.
    """
    try:
        state: RunContext = ctx.obj
        run_seed = state.seed(seed)
        strip = two_region_strip(
            rows, cols, edge_col, G0Params(*left, looks), G0Params(*right, looks), run_seed
        )
        manifest = _manifest(
            ctx, "strip", run_seed, rows=rows, cols=cols, edge_col=edge_col, left=left, right=right
        )
        manifest.add_outputs(write_raw(strip, out))
        manifest.write(manifest_path(out))
        console.print(f"[bold green]Wrote {rows}x{cols} strip to {out}[/bold green]")
    except (click.ClickException, click.exceptions.Exit):
        raise
    except Exception as e:
        _fail("Strip", e)


@cli.command()
@click.option("--json", "as_json", is_flag=True, help="Print machine-readable JSON")
@click.pass_context
def info(ctx: click.Context, as_json: bool) -> None:
    """
    Show resolved settings and library versions
    """
    state: RunContext = ctx.obj
    versions = package_versions()
    if as_json:
        payload = {"settings": state.settings.to_dict(), "sources": state.sources, "versions": versions}
        click.echo(json.dumps(payload, indent=2))
        return

    console.print("[bold blue]Settings[/bold blue]")
    for key, value in state.settings.to_dict().items():
        console.print(f"  {key}: [bold]{value}[/bold]")
    console.print(f"  (worker threads: {state.settings.worker_count})")

    console.print(f"\n[bold blue]Sources ({len(state.sources)}):[/bold blue]")
    for source in state.sources:
        console.print(f"  • {source}")

    console.print("\n[bold blue]Versions:[/bold blue]")
    for name, version in versions.items():
        console.print(f"  • {name} {version}")


def main() -> None:
    """Main entry point for the CLI."""
    cli()


if __name__ == "__main__":
    main()
