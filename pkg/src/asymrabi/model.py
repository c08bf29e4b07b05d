"""Model parameters and operator assembly in the truncated qubit x Fock basis.

The Hamiltonian of the biased qubit-oscillator model is

    H = (delta/2) sz + (epsilon/2) sx + omega (n + 1/2) + g sx (a + a+),

with hbar = 1.  All matrices are assembled dense and real symmetric in the
interleaved basis |s, m> -> flat index 2m + s, where s = 0 labels the upper
qubit state (sz = +1) and s = 1 the lower one (sz = -1).  The interleaving
keeps the Hamiltonian banded with bandwidth 3.

Parameters are normalized on entry (delta, epsilon, g divided by omega,
omega set to 1) and the original omega is applied as an overall scale on
output, so conditioning is identical for every omega.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class DimensionMismatchError(ValueError):
    """Operands have incompatible matrix dimensions."""


@dataclass(frozen=True)
class ModelParams:
    """The four model parameters (energy units, hbar = 1).

    delta   -- qubit gap, >= 0
    epsilon -- qubit bias (any sign); zero restores the parity symmetry
    omega   -- oscillator frequency, > 0
    g       -- qubit-oscillator coupling, >= 0

    The dimensionless ratios delta/omega, epsilon/omega, g/omega identify
    an instance; `normalized` returns the omega = 1 representative.
    """

    delta: float
    epsilon: float
    omega: float
    g: float

    def __post_init__(self):
        for name in ("delta", "epsilon", "omega", "g"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.omega <= 0:
            raise ValueError(f"omega must be > 0, got {self.omega!r}")
        if self.delta < 0:
            raise ValueError(f"delta must be >= 0, got {self.delta!r}")
        if self.g < 0:
            raise ValueError(f"g must be >= 0, got {self.g!r}")

    def normalized(self) -> "ModelParams":
        """Return the same instance expressed in units of omega."""
        w = self.omega
        return ModelParams(self.delta / w, self.epsilon / w, 1.0, self.g / w)


@dataclass(frozen=True)
class TruncatedBasis:
    """Truncation to Fock states 0 .. n_fock-1; total dimension 2 n_fock."""

    n_fock: int

    def __post_init__(self):
        if self.n_fock < 2:
            raise ValueError(f"n_fock must be >= 2, got {self.n_fock!r}")

    @property
    def dim(self) -> int:
        return 2 * self.n_fock

    @staticmethod
    def index(s: int, m: int) -> int:
        """Flat index of |s, m>: 2m + s with s = 0 (up) or 1 (down)."""
        return 2 * m + s


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense real operator with a symbolic tag (H, Pi, S, ...)."""

    dim: int
    entries: np.ndarray
    label: str

    def __post_init__(self):
        if self.entries.shape != (self.dim, self.dim):
            raise ValueError(
                f"entries shape {self.entries.shape} does not match dim {self.dim}"
            )


def build_hamiltonian(p: ModelParams, basis: TruncatedBasis) -> OperatorMatrix:
    """Assemble H in the flat basis as a dense real symmetric matrix.

    The zero-point term omega/2 is included.  Couplings:
      - the bias (epsilon/2) sx links |up, m> and |down, m>,
      - g sx (a + a+) links |s, m> and |flipped s, m +- 1> with
        amplitude g sqrt(max(m, m+1) appropriately).
    Only matrix elements between states differing by at most one Fock
    quantum are nonzero.
    """
    pn = p.normalized()
    n = basis.n_fock
    dim = basis.dim
    h = np.zeros((dim, dim))

    m = np.arange(n, dtype=float)
    # diagonal: oscillator ladder plus qubit gap
    h[0::2, 0::2][np.diag_indices(n)] = m + 0.5 + pn.delta / 2.0
    h[1::2, 1::2][np.diag_indices(n)] = m + 0.5 - pn.delta / 2.0

    idx = np.arange(dim)
    # bias: qubit flip at fixed m (adjacent indices 2m, 2m+1)
    h[idx[0::2], idx[0::2] + 1] = pn.epsilon / 2.0
    h[idx[0::2] + 1, idx[0::2]] = pn.epsilon / 2.0

    # coupling: qubit flip with m -> m+1, amplitude g sqrt(m+1)
    amp = pn.g * np.sqrt(m[:-1] + 1.0)
    up = idx[0:-2:2]  # |up, m>  <->  |down, m+1>  (distance 3)
    h[up, up + 3] = amp
    h[up + 3, up] = amp
    dn = idx[1:-1:2]  # |down, m>  <->  |up, m+1>  (distance 1)
    h[dn, dn + 1] = amp
    h[dn + 1, dn] = amp

    h *= p.omega
    return OperatorMatrix(dim=dim, entries=h, label="H")


def build_parity(basis: TruncatedBasis) -> OperatorMatrix:
    """Diagonal parity operator with entry (-1)^((1+sz)/2 + m).

    +1 on |down, even m> and |up, odd m>, -1 otherwise; an orthogonal
    involution with zero trace.
    """
    n = basis.n_fock
    m = np.arange(n)
    diag = np.empty(basis.dim)
    diag[0::2] = (-1.0) ** (1 + m)  # up states
    diag[1::2] = (-1.0) ** m  # down states
    return OperatorMatrix(dim=basis.dim, entries=np.diag(diag), label="Pi")


def commutator_norm(a: OperatorMatrix, b: OperatorMatrix) -> float:
    """Max absolute entry of AB - BA away from the truncation edge.

    Rows and columns touching the last Fock level are excluded, so exact
    symmetry statements are not polluted by edge artifacts of the cutoff.
    """
    if a.dim != b.dim:
        raise DimensionMismatchError(f"dims differ: {a.dim} vs {b.dim}")
    comm = a.entries @ b.entries - b.entries @ a.entries
    keep = a.dim - 2  # flat indices with Fock index < n_fock - 1
    return float(np.max(np.abs(comm[:keep, :keep])))
