"""Figure registry and renderers.

Each figure declares the CSV it consumes (by conventional name inside the
data directory) and the parameters that file must carry; rendering
refuses anything else.  Output is a fixed-size PNG with no timestamps, so
a rerun reproduces the file byte for byte.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .csvio import CsvData, FigureInputError, read_csv, require_params

QUBIT_GAP_1A = math.pi ** (-1.0 / 3.0)


@dataclass(frozen=True)
class FigureSpec:
    figure_id: str
    input_name: str
    required: dict
    renderer: Callable[[CsvData, str], None]


def _save(fig, out_path: str) -> None:
    fig.savefig(out_path, dpi=150, metadata={"Software": "figgen"})
    plt.close(fig)


def render_levels(data: CsvData, out_path: str) -> None:
    """Energy-level fan: lowest levels relative to the ground state."""
    g = data.rows[:, 0]
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for col in range(1, data.rows.shape[1]):
        ax.plot(g, data.rows[:, col], color="black", lw=0.9)
    ax.set_xlim(g[0], g[-1])
    ax.set_ylim(bottom=-0.2)
    ax.set_xlabel(r"$g/\omega$")
    ax.set_ylabel(r"$(E - E_0)/\omega$")
    _save(fig, out_path)


def _overlap_matrix_and_perms(data: CsvData):
    matrix = data.rows[:, 1:]  # strip the index column
    n = matrix.shape[0]
    if matrix.shape[1] != n:
        raise FigureInputError(f"{data.path}: overlap block is not square")
    if data.meta.get("partition") == "FOUND":
        rows = np.array(data.meta["row_permutation"], dtype=int) - 1
        cols = np.array(data.meta["col_permutation"], dtype=int) - 1
    else:
        rows = cols = np.arange(n)
    return matrix, rows, cols


def render_overlap_heatmaps(data: CsvData, out_path: str) -> None:
    """Side-by-side heatmaps: energy order and partition-permuted order."""
    matrix, rows, cols = _overlap_matrix_and_perms(data)
    permuted = matrix[np.ix_(rows, cols)]
    fig, axes = plt.subplots(1, 2, figsize=(10.0, 4.5))
    for ax, block, title in (
        (axes[0], matrix, "(a) energy order"),
        (axes[1], permuted, "(b) permuted by partition"),
    ):
        im = ax.imshow(block, origin="upper", cmap="viridis", vmin=0.0, vmax=0.5)
        ax.set_title(title)
        ax.set_xlabel("column state")
        ax.set_ylabel("row state")
    fig.colorbar(im, ax=axes, fraction=0.04)
    _save(fig, out_path)


def render_splitting(data: CsvData, out_path: str) -> None:
    """Exact gap (dots) against the closed-form splitting (solid line)."""
    g = data.column("g")
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    ax.plot(g, data.column("effective_splitting"), "-", color="black", lw=1.2)
    ax.plot(g, data.column("exact_gap"), "o", color="tab:red", ms=3.5)
    ax.set_xlim(g[0], g[-1])
    ax.set_ylim(bottom=0)
    ax.set_xlabel(r"$g/\omega$")
    ax.set_ylabel(r"$(E_5 - E_4)/\omega$")
    _save(fig, out_path)


def render_min_gap(data: CsvData, out_path: str) -> None:
    """Minimum gap over the parameter grid as a function of the bias."""
    eps = data.column("epsilon_over_omega")
    gap = np.maximum(data.column("min_gap"), 1e-16)  # log axis floor
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    ax.semilogy(eps, gap, "o-", color="black", ms=4)
    ax.set_xlabel(r"$\epsilon/\omega$")
    ax.set_ylabel(r"minimum gap $/\omega$")
    _save(fig, out_path)


FIGURES = {
    "1a": FigureSpec(
        figure_id="1a",
        input_name="fig1a.csv",
        required={
            "command": "spectrum",
            "epsilon": 0.0,
            "delta": QUBIT_GAP_1A,
            "levels": 10,
        },
        renderer=render_levels,
    ),
    "2": FigureSpec(
        figure_id="2",
        input_name="fig2.csv",
        required={
            "command": "overlap",
            "p1": [0.0, 0.7, 2.6],
            "p2": [0.0, 0.7, 0.5],
            "levels": 20,
        },
        renderer=render_overlap_heatmaps,
    ),
    "3a": FigureSpec(
        figure_id="3a",
        input_name="fig3a.csv",
        required={
            "command": "perturb",
            "epsilon": 1.0,
            "delta": 0.1,
            "pair": [2, 1],
        },
        renderer=render_splitting,
    ),
    "5": FigureSpec(
        figure_id="5",
        input_name="fig5.csv",
        required={"command": "scan", "levels": 10},
        renderer=render_min_gap,
    ),
}


def render(figure_id: str, data_dir: str, out_path: str) -> None:
    """Validate the conventional input for figure_id and render it."""
    if figure_id not in FIGURES:
        raise FigureInputError(
            f"unknown figure id {figure_id!r}; known: {sorted(FIGURES)}"
        )
    spec = FIGURES[figure_id]
    data = read_csv(Path(data_dir) / spec.input_name)
    require_params(data, spec.required, figure_id)
    spec.renderer(data, out_path)
