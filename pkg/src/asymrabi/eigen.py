"""Dense symmetric eigendecomposition with truncation-convergence control.

`diagonalize` wraps LAPACK's divide-and-conquer solver for real symmetric
matrices (via numpy) and applies a deterministic eigenvector sign
convention.  `diagonalize_converged` doubles the Fock truncation from a
floor of 32 until the requested number of lowest levels is stable, which
is the only convergence criterion used anywhere in the package.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .model import ModelParams, TruncatedBasis, build_hamiltonian

#: default floor for the truncation-doubling search
N_FOCK_FLOOR = 32
#: default truncation cap; override with the QRM_MAX_FOCK environment variable
N_FOCK_CAP = 4096
#: default energy convergence tolerance, in units of omega
DEFAULT_TOL = 1e-10


class EigenSolveError(RuntimeError):
    """The internal eigensolver iteration failed to converge.

    LAPACK's iteration is capped (about 30 sweeps per off-diagonal
    element); if that cap is exhausted we fail loudly instead of
    returning partial output.
    """


class TruncationCapError(RuntimeError):
    """Truncation doubling hit the cap before the levels converged."""

    def __init__(self, message: str, last_residual: float):
        super().__init__(message)
        self.last_residual = last_residual


@dataclass(frozen=True)
class EigenSystem:
    """Sorted spectrum of one model instance at a fixed truncation.

    energies is ascending; vectors[:, k] is the unit eigenvector of
    energies[k], with the largest-magnitude entry made positive (ties
    broken by lowest index) so overlaps are reproducible run to run.
    converged_levels counts how many lowest levels passed the
    truncation-doubling test; plain `diagonalize` makes no such claim
    and sets it to 0.
    """

    params: ModelParams
    n_fock: int
    energies: np.ndarray
    vectors: np.ndarray
    converged_levels: int = 0

    @property
    def dim(self) -> int:
        return 2 * self.n_fock

    def relative_energies(self, k: int | None = None) -> np.ndarray:
        """Lowest k energies measured from the ground state."""
        e = self.energies if k is None else self.energies[:k]
        return e - self.energies[0]


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude entry of each column positive (in place)."""
    lead = np.argmax(np.abs(vectors), axis=0)  # first max wins ties
    flip = vectors[lead, np.arange(vectors.shape[1])] < 0
    vectors[:, flip] *= -1.0
    return vectors


def diagonalize(p: ModelParams, n_fock: int) -> EigenSystem:
    """Full spectrum of the 2 n_fock dimensional Hamiltonian, ascending."""
    basis = TruncatedBasis(n_fock)
    h = build_hamiltonian(p, basis)
    try:
        energies, vectors = np.linalg.eigh(h.entries)
    except np.linalg.LinAlgError as exc:
        raise EigenSolveError(
            f"eigensolver iteration cap exhausted for n_fock={n_fock}, params={p}"
        ) from exc
    return EigenSystem(
        params=p,
        n_fock=n_fock,
        energies=energies,
        vectors=_fix_signs(vectors),
        converged_levels=0,
    )


def _fock_cap(n_cap: int | None) -> int:
    if n_cap is not None:
        return n_cap
    return int(os.environ.get("QRM_MAX_FOCK", N_FOCK_CAP))


def diagonalize_converged(
    p: ModelParams,
    k_levels: int,
    tol: float = DEFAULT_TOL,
    n_floor: int = N_FOCK_FLOOR,
    n_cap: int | None = None,
) -> EigenSystem:
    """Diagonalize with n_fock doubling until the lowest levels are stable.

    Starting from `n_floor`, compares the lowest k_levels energies at
    truncations n and 2n and accepts once the largest change is at most
    tol * omega, returning the larger-truncation system.  Its
    converged_levels field counts the longest prefix of levels that
    passed the same test (always >= k_levels on success).

    Raises TruncationCapError, carrying the last residual, if the cap
    (default 4096, overridable via QRM_MAX_FOCK) is reached first.
    """
    if k_levels < 1:
        raise ValueError(f"k_levels must be >= 1, got {k_levels}")
    if tol <= 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    cap = _fock_cap(n_cap)
    scale = tol * p.omega

    n = max(n_floor, k_levels, 2)
    prev = diagonalize(p, n)
    residual = np.inf
    while 2 * n <= cap:
        cur = diagonalize(p, 2 * n)
        diffs = np.abs(prev.energies - cur.energies[: prev.dim])
        residual = float(np.max(diffs[:k_levels]))
        if residual <= scale:
            stable = diffs <= scale
            n_conv = int(np.argmin(stable)) if not stable.all() else prev.dim
            return EigenSystem(
                params=cur.params,
                n_fock=cur.n_fock,
                energies=cur.energies,
                vectors=cur.vectors,
                converged_levels=n_conv,
            )
        prev = cur
        n *= 2
    raise TruncationCapError(
        f"lowest {k_levels} levels not converged to {tol:g}*omega at the "
        f"truncation cap n_fock={cap} (last residual {residual:.3e})",
        last_residual=residual,
    )
