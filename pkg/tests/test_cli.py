"""Tests for CLI functionality."""

import json
from pathlib import Path

import numpy as np
import pandas as pd
import pytest
from click.testing import CliRunner

from g0dist.cli import cli
from g0dist.model import G0Params, sample, write_sample


def json_payload(output):
    """The JSON document in the command output, ignoring console messages around it."""
    start, end = output.index("{"), output.rindex("}")
    return json.loads(output[start : end + 1])


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def sample_files(temp_dir):
    """Two written samples of the same unit-mean law."""
    params = G0Params.unit_mean(-1.5)
    paths = []
    for seed in (1, 2):
        path = temp_dir / f"s{seed}.csv"
        write_sample(sample(params, 60, seed=seed), path)
        paths.append(path)
    return paths


def test_cli_version(runner):
    """Test version command."""
    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert "g0dist" in result.output
    assert "version" in result.output


def test_cli_help(runner):
    result = runner.invoke(cli, ["--help"])
    assert result.exit_code == 0
    for command in ("sample", "fit", "distance", "test", "mc", "edges", "strip", "info"):
        assert command in result.output
    assert "GIL" in result.output


def test_usage_errors_exit_one(runner):
    result = runner.invoke(cli, ["sample", "--alpha", "-2"])
    assert result.exit_code == 1
    result = runner.invoke(cli, ["frobnicate"])
    assert result.exit_code == 1


def test_sample_to_stdout(runner):
    args = ["sample", "--alpha", "-2", "--gamma", "1", "--n", "5", "--seed", "7", "--format", "text"]
    first = runner.invoke(cli, args)
    second = runner.invoke(cli, args)
    assert first.exit_code == 0
    values = [float(v) for v in first.output.split()]
    assert len(values) == 5
    assert first.output == second.output


def test_sample_to_file_writes_manifest(runner, temp_dir):
    out = temp_dir / "z.csv"
    result = runner.invoke(
        cli, ["sample", "--alpha", "-3", "--gamma", "2", "--n", "20", "--seed", "3", "--out", str(out)]
    )
    assert result.exit_code == 0
    assert len(pd.read_csv(out)) == 20
    manifest = json.loads(Path(str(out) + ".manifest.json").read_text())
    assert manifest["command"] == "sample"
    assert manifest["seed"] == 3
    assert "numpy" in manifest["versions"]


def test_sample_invalid_parameters(runner):
    result = runner.invoke(cli, ["sample", "--alpha", "1", "--gamma", "1", "--n", "5", "--seed", "1"])
    assert result.exit_code == 1
    assert "Sampling failed" in result.output


def test_ci_mode_requires_seed(runner):
    result = runner.invoke(cli, ["--ci", "sample", "--alpha", "-2", "--gamma", "1", "--n", "5"])
    assert result.exit_code == 1
    assert "--seed" in result.output


def test_fit(runner, sample_files, temp_dir):
    out = temp_dir / "fit.json"
    result = runner.invoke(cli, ["fit", str(sample_files[0]), "--looks", "1", "--out", str(out)])
    assert result.exit_code == 0
    record = json.loads(out.read_text())
    assert record["n"] == 60
    assert record["alpha"] < 0
    assert record["regime"] == "Both"
    assert record["box"]["alpha_lo"] == -60.0


def test_fit_regime_needs_known_value(runner, sample_files):
    result = runner.invoke(cli, ["fit", str(sample_files[0]), "--looks", "1", "--regime", "alpha"])
    assert result.exit_code == 1
    assert "--gamma-known" in result.output


def test_numerical_failure_exits_two(runner, temp_dir):
    flat = temp_dir / "flat.txt"
    flat.write_text("2.0\n2.0\n2.0\n2.0\n")
    result = runner.invoke(cli, ["fit", str(flat), "--looks", "1"])
    assert result.exit_code == 2
    assert json_payload(result.output)["error"] == "DegenerateSampleError"


def test_fit_flat_likelihood_succeeds(runner, temp_dir):
    flat = temp_dir / "narrow.txt"
    flat.write_text("\n".join(f"{v:.3f}" for v in np.linspace(0.8, 1.2, 40)) + "\n")
    result = runner.invoke(cli, ["fit", str(flat), "--looks", "1"])
    assert result.exit_code == 0
    record = json_payload(result.output)
    assert record["converged"] is True
    assert record["feasible"] is False


def test_bad_data_exits_one(runner, temp_dir):
    bad = temp_dir / "bad.txt"
    bad.write_text("1.0\nnope\n")
    result = runner.invoke(cli, ["fit", str(bad), "--looks", "1"])
    assert result.exit_code == 1


def test_distance(runner):
    result = runner.invoke(cli, ["distance", "--alpha1", "-1", "--alpha2", "-2", "--looks", "1"])
    assert result.exit_code == 0
    payload = json_payload(result.output)
    assert payload["value"] == pytest.approx(0.6931471805599453)
    assert payload["branch"] == "closed-form-L1"

    result = runner.invoke(
        cli, ["distance", "--gamma1", "2", "--gamma2", "1", "--alpha", "-2", "--looks", "1"]
    )
    assert json_payload(result.output)["value"] == pytest.approx(0.4901, abs=1e-4)

    result = runner.invoke(cli, ["distance", "--alpha1", "-1", "--looks", "1"])
    assert result.exit_code == 1


def test_test_chi2(runner, sample_files, temp_dir):
    out = temp_dir / "test.json"
    result = runner.invoke(
        cli,
        ["test", *map(str, sample_files), "--stat", "Talpha", "--looks", "1", "--out", str(out)],
    )
    assert result.exit_code == 0
    record = json.loads(out.read_text())
    assert record["calibration"] == "Chi2Asymptotic"
    assert 0 <= record["p_value"] <= 1
    manifest = json.loads(Path(str(out) + ".manifest.json").read_text())
    assert len(manifest["inputs"]) == 2


def test_test_permutation(runner, sample_files, temp_dir):
    out = temp_dir / "test.json"
    dump = temp_dir / "perm.csv"
    args = ["test", *map(str, sample_files), "--stat", "T1", "--looks", "1", "--perm", "20"]
    args += ["--seed", "4", "--out", str(out), "--dump-permuted", str(dump)]
    result = runner.invoke(cli, args)
    assert result.exit_code == 0
    record = json.loads(out.read_text())
    assert record["calibration"] == "Permutation"
    assert record["perm"] == 20
    assert len(pd.read_csv(dump)) == 20 - record["skipped"]


def test_test_composite_rejects_chi2(runner, sample_files):
    args = ["test", *map(str, sample_files), "--stat", "T3", "--looks", "1", "--calibration", "chi2"]
    result = runner.invoke(cli, args)
    assert result.exit_code == 1


def test_mc_dry_run(runner, temp_dir):
    args = ["mc", "--experiment", "joint", "--preset", "full", "--seed", "1", "--dry-run"]
    result = runner.invoke(cli, [*args, "--out", str(temp_dir / "mc")])
    assert result.exit_code == 0
    summary = json_payload(result.output)
    assert summary["cells"] == 6
    assert summary["replications"] == 600_000
    assert not (temp_dir / "mc").exists()


def test_mc_run_from_plan(runner, temp_dir):
    plan = temp_dir / "plan.json"
    plan.write_text(
        json.dumps(
            {
                "study": "estimator",
                "alphas": [-1.5],
                "looks_set": [1],
                "sample_sizes": [40],
                "replication_rule": {"fixed": 5},
                "statistics": ["TAlpha", "TGamma"],
                "seed": 11,
            }
        )
    )
    out = temp_dir / "report"
    result = runner.invoke(cli, ["--threads", "2", "mc", "--plan", str(plan), "--out", str(out)])
    assert result.exit_code == 0
    assert (out / "cells.csv").exists()
    assert (out / "estimator_summary.csv").exists()
    assert json.loads((out / "manifest.json").read_text())["seed"] == 11


def test_mc_needs_one_source(runner, temp_dir):
    result = runner.invoke(cli, ["mc", "--out", str(temp_dir / "x")])
    assert result.exit_code == 1


def test_strip_and_edges(runner, temp_dir):
    raster = temp_dir / "strip.raw"
    result = runner.invoke(
        cli,
        ["strip", "--rows", "2", "--cols", "12", "--edge-col", "6", "--left", "-1.5", "0.5"]
        + ["--right", "-8", "7", "--seed", "5", "--out", str(raster)],
    )
    assert result.exit_code == 0
    assert Path(str(raster) + ".json").exists()

    edges = temp_dir / "edges.csv"
    profiles = temp_dir / "profiles.csv"
    result = runner.invoke(
        cli,
        ["edges", "--image", str(raster), "--perm", "5", "--seed", "3"]
        + ["--out", str(edges), "--profiles", str(profiles)],
    )
    assert result.exit_code == 0
    table = pd.read_csv(edges)
    assert table["row"].tolist() == [0, 1]
    assert set(pd.read_csv(profiles)["k"]) <= set(range(3, 10))


def test_info_json(runner):
    result = runner.invoke(cli, ["--threads", "3", "info", "--json"])
    assert result.exit_code == 0
    payload = json_payload(result.output)
    assert payload["settings"]["threads"] == 3
    assert payload["sources"][-1] == "--threads"
    assert "scipy" in payload["versions"]
