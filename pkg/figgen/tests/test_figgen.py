"""End-to-end checks: generate small CSVs with the primary CLI, render
every figure, and verify determinism and validation behavior."""

import subprocess
import sys

import numpy as np
import pytest

from figgen.csvio import FigureInputError, read_csv
from figgen.cli import main
from figgen.figures import _overlap_matrix_and_perms


def primary(args, out):
    cmd = [sys.executable, "-m", "asymrabi.cli"] + args + ["--out", str(out)]
    subprocess.run(cmd, check=True, capture_output=True, text=True)


@pytest.fixture(scope="module")
def data_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("data")
    primary(
        ["spectrum", "--eps", "0", "--delta", "pi^-1/3", "--g", "0:3:0.25",
         "--levels", "10"],
        d / "fig1a.csv",
    )
    primary(
        ["overlap", "--p1", "0,0.7,2.6", "--p2", "0,0.7,0.5", "--levels", "20",
         "--partition"],
        d / "fig2.csv",
    )
    primary(
        ["perturb", "--eps", "1", "--delta", "0.1", "--pair", "2,1",
         "--g", "0:2:0.25"],
        d / "fig3a.csv",
    )
    primary(
        ["scan", "--eps", "0:2:1", "--d-range", "0.5:0.7", "--g-range", "0.5:0.7",
         "--step", "0.1", "--levels", "10", "--workers", "1"],
        d / "fig5.csv",
    )
    return d


@pytest.mark.parametrize("figure_id", ["1a", "2", "3a", "5"])
def test_renders_each_figure(figure_id, data_dir, tmp_path):
    out = tmp_path / f"fig{figure_id}.png"
    assert main([figure_id, "--data", str(data_dir), "--out", str(out)]) == 0
    assert out.exists() and out.stat().st_size > 1000


@pytest.mark.parametrize("figure_id", ["1a", "2", "3a", "5"])
def test_rendering_is_deterministic(figure_id, data_dir, tmp_path):
    a = tmp_path / "a.png"
    b = tmp_path / "b.png"
    assert main([figure_id, "--data", str(data_dir), "--out", str(a)]) == 0
    assert main([figure_id, "--data", str(data_dir), "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_permuted_heatmap_has_zero_off_diagonal_blocks(data_dir):
    data = read_csv(data_dir / "fig2.csv")
    matrix, rows, cols = _overlap_matrix_and_perms(data)
    assert data.meta["partition"] == "FOUND"
    permuted = matrix[np.ix_(rows, cols)]
    n1 = len(str(data.meta["groups_row"]).split("|")[0].split(","))
    assert n1 == 10
    assert np.all(permuted[:n1, n1:] == 0.0)
    assert np.all(permuted[n1:, :n1] == 0.0)
    assert np.all(permuted[:n1, :n1] > 0.0)
    assert np.all(permuted[n1:, n1:] > 0.0)


def test_mismatched_parameters_refused(data_dir, tmp_path):
    # a spectrum at the wrong bias must not pass as figure 1a
    bad_dir = tmp_path / "bad"
    bad_dir.mkdir()
    primary(
        ["spectrum", "--eps", "0.2", "--delta", "pi^-1/3", "--g", "0:3:0.5",
         "--levels", "10"],
        bad_dir / "fig1a.csv",
    )
    out = tmp_path / "nope.png"
    code = main(["1a", "--data", str(bad_dir), "--out", str(out)])
    assert code == 1
    assert not out.exists()


def test_missing_input_refused(tmp_path):
    out = tmp_path / "nope.png"
    code = main(["5", "--data", str(tmp_path), "--out", str(out)])
    assert code == 1
    assert not out.exists()


def test_empty_csv_refused(tmp_path):
    (tmp_path / "fig5.csv").write_text("# tool: asymrabi 0.1.0\n")
    out = tmp_path / "nope.png"
    code = main(["5", "--data", str(tmp_path), "--out", str(out)])
    assert code == 1
    assert not out.exists()


def test_wrong_figure_id_rejected(tmp_path):
    with pytest.raises(SystemExit):
        main(["9z", "--data", str(tmp_path), "--out", str(tmp_path / "x.png")])
