"""Generalized rotating-wave effective two-level model.

When the bias sits near an integer multiple of the oscillator frequency,
epsilon ~ n omega, pairs of displaced-oscillator product states become
near resonant and the qubit gap couples each pair through the matrix
element

    dtilde(m, n) = delta exp(-2g^2/w^2) (-2g/w)^n sqrt((m-n)!/m!)
                   L_{m-n}^n(4g^2/w^2),

with L an associated Laguerre polynomial.  The resulting 2x2 eigenvalue
splitting sqrt((eps - n w)^2 + dtilde^2) approximates the exact adjacent
gap of the paired levels, and the positive g-zeros of dtilde predict the
locations of exact level crossings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .eigen import DEFAULT_TOL, diagonalize_converged
from .model import ModelParams


class RootCountError(RuntimeError):
    """Located root count disagrees with the polynomial degree."""


@dataclass(frozen=True)
class EffectivePair:
    """One near-resonant level pair of the effective model.

    m >= n >= 0; n is the resonance order (eps ~ n w).  splitting is the
    eigenvalue gap of the 2x2 block, never below |dtilde| or |detuning|.
    """

    m: int
    n: int
    dtilde: float
    detuning: float
    splitting: float


def laguerre(k: int, n: int, x: float) -> float:
    """Associated Laguerre polynomial L_k^n(x) by the three-term recurrence.

    Stable and exact to rounding for the degrees used here (k up to ~50).
    """
    if k < 0 or n < 0:
        raise ValueError(f"require k >= 0 and n >= 0, got k={k}, n={n}")
    if k == 0:
        return 1.0
    prev = 1.0
    cur = 1.0 + n - x
    for i in range(1, k):
        prev, cur = cur, ((2 * i + 1 + n - x) * cur - (i + n) * prev) / (i + 1)
    return cur


def _factorial_ratio_sqrt(m: int, n: int) -> float:
    """sqrt((m-n)!/m!) as a product of inverse square roots, overflow-free."""
    out = 1.0
    for j in range(m - n + 1, m + 1):
        out /= math.sqrt(j)
    return out


def dtilde(p: ModelParams, m: int, n: int) -> float:
    """Effective qubit-gap matrix element between the (m, n) pair states."""
    if m < n or n < 0:
        raise ValueError(f"require m >= n >= 0, got m={m}, n={n}")
    r = p.g / p.omega
    return (
        p.delta
        * math.exp(-2.0 * r * r)
        * (-2.0 * r) ** n
        * _factorial_ratio_sqrt(m, n)
        * laguerre(m - n, n, 4.0 * r * r)
    )


def effective_splitting(p: ModelParams, m: int, n: int) -> EffectivePair:
    """Eigenvalue gap of the 2x2 effective block for the (m, n) pair."""
    dt = dtilde(p, m, n)
    detuning = p.epsilon - n * p.omega
    return EffectivePair(
        m=m, n=n, dtilde=dt, detuning=detuning, splitting=math.hypot(detuning, dt)
    )


def locate_exact_pair(
    p: ModelParams, m: int, n: int, g: float, tol: float = DEFAULT_TOL
) -> int:
    """1-based index k of the exact level pair (k, k+1) tracking (m, n).

    The pair is found by energy proximity to the unperturbed pair energy
    m w - g^2/w + w/2 - eps/2 (displaced-oscillator value including the
    zero-point term); level identity by index is not meaningful across
    crossings, proximity is.
    """
    if m < n or n < 0:
        raise ValueError(f"require m >= n >= 0, got m={m}, n={n}")
    probe = ModelParams(p.delta, p.epsilon, p.omega, float(g))
    es = diagonalize_converged(probe, 2 * m + 4, tol)
    target = m * p.omega - g * g / p.omega + p.omega / 2 - p.epsilon / 2
    e = es.energies[: 2 * m + 3]
    cost = np.abs(e[:-1] - target) + np.abs(e[1:] - target)
    return int(np.argmin(cost)) + 1


def predicted_crossings(p: ModelParams, m: int, n: int) -> np.ndarray:
    """Positive g-roots of L_{m-n}^n(4 g^2/w^2), ascending.

    At resonance (eps = n w) these are the predicted crossing locations of
    the paired levels; there are exactly m - n of them.  Roots are
    bracketed by sign changes on a logarithmic grid in x = 4 g^2/w^2 and
    polished by bisection.  A count other than m - n means the bracketing
    grid failed and is reported as an internal error.
    """
    if m <= n:
        raise ValueError(f"require m > n, got m={m}, n={n}")
    if abs(p.epsilon - n * p.omega) > 1e-9 * p.omega:
        raise ValueError(
            f"predicted crossings need eps = n*omega; got eps={p.epsilon}, n={n}"
        )
    k = m - n
    x_hi = 4 * k + 2 * n + 4  # all zeros of L_k^n lie below this
    xs = np.geomspace(x_hi * 1e-10, x_hi, 20_000)
    vals = np.array([laguerre(k, n, x) for x in xs])
    signs = np.sign(vals)
    idx = np.nonzero(signs[:-1] * signs[1:] < 0)[0]
    roots = []
    for i in idx:
        a, b = xs[i], xs[i + 1]
        fa = vals[i]
        for _ in range(200):
            mid = 0.5 * (a + b)
            fm = laguerre(k, n, mid)
            if fm == 0.0:
                a = b = mid
                break
            if fa * fm < 0:
                b = mid
            else:
                a, fa = mid, fm
            if b - a <= 1e-15 * b:
                break
        roots.append(0.5 * (a + b))
    exact_hits = np.nonzero(vals == 0.0)[0]
    roots.extend(xs[exact_hits])
    roots = sorted(roots)
    if len(roots) != k:
        raise RootCountError(
            f"expected {k} positive roots for L_{k}^{n}, found {len(roots)}"
        )
    return p.omega * np.sqrt(np.asarray(roots)) / 2.0
