import math

import numpy as np
import pytest

from asymrabi.eigen import diagonalize_converged
from asymrabi.model import ModelParams, TruncatedBasis, build_parity
from asymrabi.spectra import (
    MonotoneGapError,
    SweepEvalError,
    baseline_energies,
    gap_curve,
    refine_crossing,
    sweep_levels,
)

IRRATIONAL_GAP = math.pi ** (-1.0 / 3.0)


def test_sweep_ground_reference():
    fixed = ModelParams(IRRATIONAL_GAP, 0.0, 1.0, 0.0)
    sweep = sweep_levels(fixed, "g", np.linspace(0.0, 1.0, 6), K=10)
    assert np.all(sweep.levels[:, 0] == 0.0)
    assert np.all(np.diff(sweep.levels, axis=1) >= 0)
    assert np.all(np.isfinite(sweep.levels))


def test_sweep_degenerate_displaced_ladder():
    # delta = eps = 0 is a doubly degenerate displaced ladder: the two
    # lowest levels coincide for every g and the next distinct level sits
    # one quantum up
    fixed = ModelParams(0.0, 0.0, 1.0, 0.0)
    sweep = sweep_levels(fixed, "g", np.linspace(0.1, 2.1, 5), K=3)
    assert np.max(np.abs(sweep.levels[:, 1])) < 1e-9
    assert np.max(np.abs(sweep.levels[:, 2] - 1.0)) < 1e-9


def test_sweep_rejects_bad_grid():
    fixed = ModelParams(0.5, 0.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        sweep_levels(fixed, "g", np.array([1.0, 0.5]), K=3)
    with pytest.raises(ValueError):
        sweep_levels(fixed, "q", np.array([0.5, 1.0]), K=3)


def test_sweep_error_carries_grid_point(monkeypatch):
    monkeypatch.setenv("QRM_MAX_FOCK", "32")
    fixed = ModelParams(0.5, 0.0, 1.0, 0.0)
    with pytest.raises(SweepEvalError) as err:
        sweep_levels(fixed, "g", np.array([0.1, 0.2]), K=4)
    assert err.value.swept == "g"
    assert err.value.value in (0.1, 0.2)


def test_gap_curve_matches_effective_formula():
    # away from g ~ 0 the leading-order effective model tracks the exact
    # levels 4-5 splitting at eps = w closely
    fixed = ModelParams(0.1, 1.0, 1.0, 0.0)
    grid = np.linspace(0.1, 1.1, 11)
    gaps = gap_curve(fixed, "g", grid, k=4)
    formula = (
        0.1
        * 2 ** (-0.5)
        * np.exp(-2 * grid**2)
        * 2
        * grid
        * np.abs(2 - 4 * grid**2)
    )
    assert np.max(np.abs(gaps - formula)) < 0.01 * formula.max()


def test_gap_curve_delta_zero_pairs():
    # at delta = 0 and eps = w the paired baseline levels are exactly
    # degenerate for every g, and neighboring pairs sit one quantum apart
    fixed = ModelParams(0.0, 1.0, 1.0, 0.0)
    grid = np.linspace(0.2, 1.8, 5)
    assert np.max(gap_curve(fixed, "g", grid, k=2)) < 1e-10
    assert np.max(np.abs(gap_curve(fixed, "g", grid, k=1) - 1.0)) < 1e-10


def test_gap_curves_nonnegative():
    fixed = ModelParams(IRRATIONAL_GAP, 0.2, 1.0, 0.0)
    for k in (1, 3, 5):
        gaps = gap_curve(fixed, "g", np.linspace(0.1, 1.9, 7), k=k)
        assert np.all(gaps >= 0)


def test_gap_curve_refinement_continuity():
    # halving the grid in a smooth region moves the linear interpolant by
    # far less than 1e-6 w
    fixed = ModelParams(0.7, 0.3, 1.0, 0.0)
    coarse = np.linspace(0.5, 0.508, 9)
    fine = np.linspace(0.5, 0.508, 17)
    g_coarse = gap_curve(fixed, "g", coarse, k=2)
    g_fine = gap_curve(fixed, "g", fine, k=2)
    interp = np.interp(fine, coarse, g_coarse)
    assert np.max(np.abs(interp - g_fine)) < 1e-6


def test_refine_certified_crossing_at_eps0():
    fixed = ModelParams(IRRATIONAL_GAP, 0.0, 1.0, 0.0)
    report = refine_crossing(fixed, "g", (0.4, 0.56), k=3)
    assert report.certified
    assert report.gap_at_star <= 1e-8
    assert 0.4 <= report.g_star <= 0.56
    assert report.level_pair == (3, 4)


def test_certified_crossing_links_opposite_parities():
    fixed = ModelParams(IRRATIONAL_GAP, 0.0, 1.0, 0.0)
    report = refine_crossing(fixed, "g", (0.3, 0.42), k=5)
    assert report.certified
    for side in (-1e-3, 1e-3):
        es = diagonalize_converged(
            ModelParams(IRRATIONAL_GAP, 0.0, 1.0, report.g_star + side), 7
        )
        pi = build_parity(TruncatedBasis(es.n_fock)).entries
        p_lo = es.vectors[:, 4] @ pi @ es.vectors[:, 4]
        p_hi = es.vectors[:, 5] @ pi @ es.vectors[:, 5]
        assert p_lo * p_hi < -0.99


def test_refine_avoided_crossing_not_certified():
    # a biased avoided crossing keeps a finite gap
    fixed = ModelParams(IRRATIONAL_GAP, 0.2, 1.0, 0.0)
    report = refine_crossing(fixed, "g", (0.3, 0.45), k=5)
    assert not report.certified
    assert report.gap_at_star > 1e-4


def test_refine_monotone_gap_error():
    fixed = ModelParams(IRRATIONAL_GAP, 0.0, 1.0, 0.0)
    with pytest.raises(MonotoneGapError):
        refine_crossing(fixed, "g", (1.4, 1.8), k=1)


def test_refine_validates_bracket():
    fixed = ModelParams(0.5, 0.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        refine_crossing(fixed, "g", (0.8, 0.3), k=1)


def test_baseline_ladder():
    p = ModelParams(0.3, 0.0, 1.0, 0.0)
    values = baseline_energies(p, 3)
    assert np.allclose(values, [0, 0, 1, 1, 2, 2, 3, 3], atol=0)


def test_baseline_direct_arithmetic():
    p = ModelParams(0.0, 1.0, 1.0, 0.8)
    assert np.allclose(baseline_energies(p, 0), [-1.14, -0.14], atol=1e-12)


def test_baselines_match_delta_zero_spectrum():
    # cross-check against the exact solver, shifted by the zero-point term
    p = ModelParams(0.0, 0.7, 1.0, 1.2)
    es = diagonalize_converged(p, 12)
    expected = baseline_energies(p, 10)[:12] + 0.5 * p.omega
    assert np.max(np.abs(es.energies[:12] - expected)) < 1e-10


def test_baseline_rejects_negative_n():
    with pytest.raises(ValueError):
        baseline_energies(ModelParams(0.3, 0.0, 1.0, 0.0), -1)
