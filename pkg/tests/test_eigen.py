import math

import numpy as np
import pytest

from asymrabi.eigen import (
    TruncationCapError,
    diagonalize,
    diagonalize_converged,
)
from asymrabi.model import ModelParams, TruncatedBasis, build_hamiltonian, build_parity
from asymrabi.spectra import baseline_energies
from conftest import random_params

IRRATIONAL_GAP = math.pi ** (-1.0 / 3.0)


def test_decoupled_lowest_four():
    es = diagonalize(ModelParams(0.7, 0.0, 1.0, 0.0), 8)
    assert np.allclose(es.energies[:4], [0.15, 0.85, 1.15, 1.85], atol=1e-12)


def test_delta_zero_matches_baselines():
    # the delta = 0 line is exactly solvable; spectrum = baselines + w/2
    p = ModelParams(0.0, 1.0, 1.0, 0.8)
    es = diagonalize_converged(p, 10)
    expected = baseline_energies(p, 8)[:10] + 0.5
    assert np.max(np.abs(es.energies[:10] - expected)) < 1e-10


def test_high_bias_crossing_level():
    # near g = 1.21279135 at eps = 5 two levels meet at relative energy
    # 6.0112638; they are the 8th and 9th levels of the sorted spectrum
    p = ModelParams(IRRATIONAL_GAP, 5.0, 1.0, 1.21279135)
    es = diagonalize_converged(p, 10)
    rel = es.relative_energies(10)
    assert abs(rel[7] - 6.0112638) < 1e-6
    assert abs(rel[8] - 6.0112638) < 1e-6


def test_convergence_self_consistency():
    es = diagonalize_converged(ModelParams(0.7, 0.0, 1.0, 0.5), 10, tol=1e-10)
    bigger = diagonalize(es.params, 2 * es.n_fock)
    drift = np.abs(es.energies[:10] - bigger.energies[:10])
    assert np.max(drift) <= 1e-10


def test_convergence_grows_with_coupling():
    # stronger coupling displaces the oscillator further and needs more
    # Fock states
    small = diagonalize_converged(ModelParams(IRRATIONAL_GAP, 5.0, 1.0, 0.5), 10)
    large = diagonalize_converged(ModelParams(IRRATIONAL_GAP, 5.0, 1.0, 3.0), 10)
    assert large.n_fock > small.n_fock


def test_uncoupled_converges_at_floor():
    es = diagonalize_converged(ModelParams(0.7, 0.3, 1.0, 0.0), 10)
    assert es.n_fock == 64  # floor 32, one confirming doubling


def test_converged_levels_at_least_requested():
    es = diagonalize_converged(ModelParams(0.9, 1.3, 1.0, 1.1), 12)
    assert es.converged_levels >= 12


def test_residual_and_orthonormality(rng):
    for p in random_params(rng, 4):
        es = diagonalize_converged(p, 8)
        h = build_hamiltonian(p, TruncatedBasis(es.n_fock)).entries
        k = es.converged_levels
        v = es.vectors[:, :k]
        resid = h @ v - v * es.energies[:k]
        bound = 1e-10 * np.maximum(1.0, np.abs(es.energies[:k]))
        assert np.all(np.max(np.abs(resid), axis=0) <= bound)
        gram = v.T @ v - np.eye(k)
        assert np.max(np.abs(gram)) <= 1e-10


def test_eigenvalues_invariant_under_reordering(rng):
    p = random_params(rng, 1)[0]
    h = build_hamiltonian(p, TruncatedBasis(32)).entries
    perm = rng.permutation(h.shape[0])
    shuffled = h[np.ix_(perm, perm)]
    e0 = np.linalg.eigvalsh(h)
    e1 = np.linalg.eigvalsh(shuffled)
    assert np.max(np.abs(e0 - e1)) <= 1e-12


def test_unbiased_eigenvectors_have_definite_parity(rng):
    for p in random_params(rng, 3, eps=0.0):
        es = diagonalize_converged(p, 10)
        pi = build_parity(TruncatedBasis(es.n_fock)).entries
        for k in range(es.converged_levels):
            v = es.vectors[:, k]
            sign = np.sign(v @ pi @ v)
            assert np.max(np.abs(pi @ v - sign * v)) <= 1e-8


def test_sign_convention_deterministic():
    p = ModelParams(0.7, 0.4, 1.0, 1.3)
    a = diagonalize(p, 48)
    b = diagonalize(p, 48)
    assert np.array_equal(a.energies, b.energies)
    assert np.array_equal(a.vectors, b.vectors)
    lead = np.argmax(np.abs(a.vectors), axis=0)
    assert np.all(a.vectors[lead, np.arange(a.dim)] > 0)


def test_truncation_cap_error_carries_residual():
    with pytest.raises(TruncationCapError) as err:
        diagonalize_converged(
            ModelParams(0.7, 0.0, 1.0, 3.0), 10, tol=1e-14, n_cap=64
        )
    assert err.value.last_residual > 0


def test_cap_env_override(monkeypatch):
    monkeypatch.setenv("QRM_MAX_FOCK", "32")
    with pytest.raises(TruncationCapError):
        diagonalize_converged(ModelParams(0.7, 0.0, 1.0, 0.5), 10)


def test_argument_validation():
    p = ModelParams(0.7, 0.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        diagonalize_converged(p, 0)
    with pytest.raises(ValueError):
        diagonalize_converged(p, 5, tol=0.0)
