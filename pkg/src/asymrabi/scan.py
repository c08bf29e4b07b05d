"""Minimum-gap scans over the (delta/omega, g/omega) plane.

For each bias value the scan diagonalizes the model on a rectangular
parameter grid and records the smallest adjacent-level gap among the
lowest k levels, together with where it occurred.  A vanishing minimum
at integer bias and a finite floor everywhere else is the signature that
integer bias is the only place exact crossings occur.

Grid points are independent tasks; with workers > 1 they are mapped over
a process pool and reduced in grid order, so results are identical for
any worker count.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from threadpoolctl import threadpool_limits

from .eigen import DEFAULT_TOL, diagonalize_converged
from .model import ModelParams

_limiter = None


def _single_threaded_blas() -> None:
    """Pin BLAS to one thread so every eigensolve performs identical
    arithmetic whether it runs serially or inside a worker process."""
    global _limiter
    if _limiter is None:
        _limiter = threadpool_limits(limits=1)


class ScanEvalError(RuntimeError):
    """Eigensolve failed at one grid point; carries the point."""

    def __init__(self, delta: float, g: float, cause: Exception):
        super().__init__(f"eigensolve failed at delta={delta!r}, g={g!r}: {cause}")
        self.delta = delta
        self.g = g


@dataclass(frozen=True)
class GapScanResult:
    """Minimum adjacent gap over one (delta, g) grid at fixed bias.

    argmin is (delta/omega, g/omega, k) with k the 1-based lower level of
    the minimizing pair; ties resolve to the lexicographically smallest
    (delta, g, k).
    """

    epsilon_over_omega: float
    d_range: tuple[float, float]
    g_range: tuple[float, float]
    step: float
    k_levels: int
    min_gap: float
    argmin: tuple[float, float, int]


def grid_points(lo: float, hi: float, step: float) -> np.ndarray:
    """Ascending grid lo, lo+step, ... covering [lo, hi]."""
    if step <= 0:
        raise ValueError(f"step must be > 0, got {step}")
    if hi < lo:
        raise ValueError(f"empty range: [{lo}, {hi}]")
    count = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(count)


def _point_min_gap(args) -> tuple[float, int]:
    """Smallest adjacent gap at one grid point; returns (gap, 1-based k)."""
    eps, delta, g, k_levels, tol = args
    p = ModelParams(delta=delta, epsilon=eps, omega=1.0, g=g)
    try:
        es = diagonalize_converged(p, k_levels, tol)
    except Exception as exc:
        raise ScanEvalError(delta, g, exc) from exc
    gaps = np.diff(es.energies[:k_levels])
    k = int(np.argmin(gaps))  # first minimum, i.e. smallest k
    return float(gaps[k]), k + 1


def min_gap_scan(
    eps_over_omega: float,
    d_range: tuple[float, float],
    g_range: tuple[float, float],
    step: float,
    k_levels: int,
    tol: float = DEFAULT_TOL,
    workers: int = 1,
) -> GapScanResult:
    """Minimum of E_{k+1} - E_k over the grid, k = 1..k_levels-1.

    All energies are in units of omega (the scan fixes omega = 1).
    Eigensolver failures propagate with the offending grid point attached.
    """
    if k_levels < 2:
        raise ValueError(f"k_levels must be >= 2, got {k_levels}")
    deltas = grid_points(*d_range, step)
    gs = grid_points(*g_range, step)
    tasks = [
        (eps_over_omega, float(d), float(g), k_levels, tol) for d in deltas for g in gs
    ]

    if workers > 1:
        chunk = max(1, len(tasks) // (8 * workers))
        with ProcessPoolExecutor(
            max_workers=workers, initializer=_single_threaded_blas
        ) as pool:
            results = list(pool.map(_point_min_gap, tasks, chunksize=chunk))
    else:
        with threadpool_limits(limits=1):
            results = [_point_min_gap(t) for t in tasks]

    best_gap = np.inf
    best = (np.nan, np.nan, 0)
    for (eps, d, g, _, _), (gap, k) in zip(tasks, results):
        if gap < best_gap:  # strict: first occurrence wins, grid order is lexicographic
            best_gap = gap
            best = (d, g, k)
    return GapScanResult(
        epsilon_over_omega=eps_over_omega,
        d_range=(float(d_range[0]), float(d_range[1])),
        g_range=(float(g_range[0]), float(g_range[1])),
        step=float(step),
        k_levels=k_levels,
        min_gap=float(best_gap),
        argmin=best,
    )


def epsilon_sweep(
    eps_grid,
    d_range: tuple[float, float],
    g_range: tuple[float, float],
    step: float,
    k_levels: int,
    tol: float = DEFAULT_TOL,
    workers: int = 1,
) -> list[GapScanResult]:
    """One min_gap_scan per bias value, in grid order."""
    eps_grid = np.asarray(eps_grid, dtype=float)
    if eps_grid.ndim != 1 or eps_grid.size == 0 or np.any(np.diff(eps_grid) < 0):
        raise ValueError("eps_grid must be a nonempty ascending 1-d array")
    return [
        min_gap_scan(float(eps), d_range, g_range, step, k_levels, tol, workers)
        for eps in eps_grid
    ]
