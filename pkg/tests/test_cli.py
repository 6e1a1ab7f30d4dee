"""Tests for the command line interface."""

import json

import numpy as np
import pytest
from click.testing import CliRunner

from tvreg import __version__
from tvreg.cli import EXIT_ERROR, EXIT_MAX_ITERS, cli, merge_experiment_config
from tvreg.linalg import SparseMatrix, Volume
from tvreg.models import Algorithm
from tvreg.tomo import ProjectionGeometry, TestProblem


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def bundle(tiny_tomo, tmp_path):
    path = tmp_path / "tiny.npz"
    tiny_tomo.save(path)
    return path


def write_config(path, **values):
    path.write_text("".join(f"{k}={v}\n" for k, v in values.items()))
    return path


def test_version(runner):
    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert __version__ in result.output


class TestTheory:
    def test_prints_bounds(self, runner):
        args = ["theory", "--norm-a-sq", "2", "--sigma-min-sq", "0.5", "--alpha", "0.5"]
        result = runner.invoke(cli, args + ["--tau", "0.25"])
        assert result.exit_code == 0
        assert "mu = 0.5" in result.output
        assert "L  = 26" in result.output
        assert "Q  = 52" in result.output

    def test_rank_deficient(self, runner):
        result = runner.invoke(cli, ["theory", "--norm-a-sq", "2", "--alpha", "1", "--tau", "1"])
        assert result.exit_code == 0
        assert "mu = 0" in result.output

    def test_invalid_norm(self, runner):
        result = runner.invoke(cli, ["theory", "--norm-a-sq", "0", "--alpha", "1", "--tau", "1"])
        assert result.exit_code == EXIT_ERROR
        assert "Error:" in result.output


class TestExports:
    def test_phantom_text(self, runner, tmp_path):
        out = tmp_path / "phantom.txt"
        result = runner.invoke(cli, ["phantom", "--dims", "3,2,2", "--out", str(out)])
        assert result.exit_code == 0
        assert out.read_text().splitlines()[0] == "3 2 2"
        assert Volume.load_text(out).dims == (3, 2, 2)

    def test_phantom_binary(self, runner, tmp_path):
        out = tmp_path / "phantom.bin"
        result = runner.invoke(
            cli, ["phantom", "--dims", "4,4,4", "--out", str(out), "--format", "binary"]
        )
        assert result.exit_code == 0
        assert Volume.load_binary(out).dims == (4, 4, 4)

    def test_phantom_bad_dims(self, runner, tmp_path):
        result = runner.invoke(cli, ["phantom", "--dims", "3,x,2", "--out", str(tmp_path / "p")])
        assert result.exit_code == 2
        assert "m,n,l" in result.output

    def test_matrix_market(self, runner, tmp_path):
        out = tmp_path / "A.mtx"
        geometry = tmp_path / "directions.txt"
        result = runner.invoke(
            cli, ["matrix", "--preset", "T2-desk", "--out", str(out), "--geometry", str(geometry)]
        )
        assert result.exit_code == 0
        A = SparseMatrix.load_matrix_market(out)
        assert A.cols == 21**3
        assert np.all(np.diff(A.indptr) > 0)
        assert ProjectionGeometry.read_manifest(geometry).n_proj == 13

    def test_build_custom_bundle(self, runner, tmp_path):
        out = tmp_path / "custom.npz"
        args = ["build", "--dims", "4,4,4", "--p", "5", "--n-proj", "13", "--seed", "3"]
        result = runner.invoke(cli, args + ["--out", str(out)])
        assert result.exit_code == 0
        problem = TestProblem.load(out)
        assert problem.spec.name == "custom"
        assert problem.spec.dims == (4, 4, 4)
        assert problem.spec.seed == 3
        assert problem.A.cols == 64

    def test_build_unsupported_projection_count(self, runner, tmp_path):
        args = ["build", "--dims", "4,4,4", "--n-proj", "20", "--out", str(tmp_path / "x.npz")]
        result = runner.invoke(cli, args)
        assert result.exit_code == EXIT_ERROR
        assert "unsupported" in result.output


class TestSolve:
    def test_converges(self, runner, bundle, tmp_path):
        out = tmp_path / "solve"
        args = ["solve", "--problem", str(bundle), "--algorithm", "upn", "--alpha", "1"]
        args += ["--tau", "0.1", "--eps-bar", "1e-3", "--out", str(out)]
        result = runner.invoke(cli, args)
        assert result.exit_code == 0, result.output
        assert (out / "tiny_a1_t0.1_upn.csv").exists()
        assert (out / "manifest.json").exists()

    def test_max_iters_exit_code(self, runner, bundle, tmp_path):
        args = ["solve", "--problem", str(bundle), "--algorithm", "gp", "--max-iters", "1"]
        args += ["--tau", "0.1", "--out", str(tmp_path / "capped")]
        result = runner.invoke(cli, args)
        assert result.exit_code == EXIT_MAX_ITERS

    def test_missing_problem(self, runner, tmp_path):
        args = ["solve", "--problem", str(tmp_path / "missing.npz"), "--out", str(tmp_path)]
        result = runner.invoke(cli, args)
        assert result.exit_code == EXIT_ERROR
        assert "Error:" in result.output


class TestExperiment:
    def test_config_file_and_overrides(self, tmp_path):
        path = write_config(
            tmp_path / "exp.env", problem="T2-desk", solvers="gp,upn", max_iters=50, eps_bar=1e-5
        )
        config = merge_experiment_config(str(path), {"max_iters": 10, "taus": None})
        assert config.problem == "T2-desk"
        assert config.solvers == [Algorithm.GP, Algorithm.UPN]
        assert config.max_iters == 10
        assert config.eps_bar == 1e-5
        assert config.taus == [1e-4]

    def test_runs_and_verifies(self, runner, bundle, tmp_path):
        out = tmp_path / "exp"
        path = write_config(
            tmp_path / "exp.env",
            problem=bundle,
            solvers="upn,upn0",
            alphas="1",
            taus="0.1",
            eps_bar="1e-3",
            max_iters="5000",
            out=out,
        )
        result = runner.invoke(cli, ["experiment", "--config", str(path)])
        assert result.exit_code == 0, result.output
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["config"]["solvers"] == ["upn", "upn0"]
        assert "tiny_a1_t0.1_upn0.dat" in manifest["files"]

        result = runner.invoke(cli, ["verify", str(out / "manifest.json")])
        assert result.exit_code == 0

        (out / "tiny_a1_t0.1_upn.csv").write_text("tampered\n")
        result = runner.invoke(cli, ["verify", str(out / "manifest.json")])
        assert result.exit_code == EXIT_ERROR
        assert "tiny_a1_t0.1_upn.csv" in result.output

    def test_invalid_config(self, runner, tmp_path):
        path = write_config(tmp_path / "bad.env", solvers="cg")
        result = runner.invoke(cli, ["experiment", "--config", str(path)])
        assert result.exit_code == EXIT_ERROR


def test_scaling_command(runner):
    result = runner.invoke(cli, ["scaling", "--conds", "10,100", "--n", "8", "--eps-bar", "1e-6"])
    assert result.exit_code == 0
    assert "upn: iterations ~ Q^" in result.output
    assert "gpbb: iterations ~ Q^" in result.output


def test_reference_command(runner, bundle, tmp_path):
    out = tmp_path / "ref.npz"
    args = ["reference", "--problem", str(bundle), "--tau", "0.1", "--eps-bar", "1e-3"]
    result = runner.invoke(cli, args + ["--out", str(out)])
    assert result.exit_code == 0
    assert "phi* =" in result.output
    with np.load(out) as data:
        assert data["x_star"].shape == (125,)

    again = runner.invoke(cli, args)
    assert "(cached)" in again.output
