"""Eigenbasis overlap matrices and the symmetry-partition search.

Two eigenbases of the model at different parameter points are compared
through the matrix of absolute overlaps |<row state | column state>|.
If the model has a symmetry whose sectors do not depend on the varied
parameters, every overlap between states of different sectors vanishes;
grouping the states by the zero pattern then recovers the sectors.  The
zero/nonzero split is only trusted when the retained and discarded
magnitudes are separated by at least three decades, recorded on the
matrix as a scale-separation certificate.

Where a partition exists, a symmetry operator is synthesized numerically
as a label-weighted sum of projectors onto the groups; by construction it
commutes with the Hamiltonian on the converged span.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .eigen import DEFAULT_TOL, EigenSystem, diagonalize_converged
from .model import ModelParams, OperatorMatrix

#: default classification threshold for treating an overlap as zero
ZERO_THRESHOLD = 1e-8

#: required ratio between smallest retained and largest ignored overlap
SEPARATION_MIN = 1e3

#: adjacent levels closer than this (units of omega) are treated as one block
DEGENERACY_TOL = 1e-9


class TruncationMismatchError(ValueError):
    """Eigensystems were computed at different Fock truncations."""


class InsufficientConvergenceError(ValueError):
    """An eigensystem has fewer converged levels than requested."""


class ScaleSeparationError(RuntimeError):
    """Zero classification lacks a certified scale separation."""


@dataclass(frozen=True)
class OverlapMatrix:
    """|<psi_n(row params)|psi_m(col params)>| block with classification data.

    zero_mask and the threshold/largest_ignored/smallest_retained fields
    are filled by classify_zeros; before that they are None.  Rows or
    columns listed in degenerate_rows/degenerate_cols belong to
    (near-)degenerate level blocks whose entries were replaced by the
    largest principal-angle cosine of the spanned subspaces, since
    single-vector overlaps are not well defined there.
    """

    params_row: ModelParams
    params_col: ModelParams
    n_levels: int
    entries: np.ndarray
    degenerate_rows: tuple[int, ...] = ()
    degenerate_cols: tuple[int, ...] = ()
    zero_threshold: float | None = None
    zero_mask: np.ndarray | None = None
    largest_ignored: float | None = None
    smallest_retained: float | None = None

    @property
    def separation(self) -> float | None:
        """Certificate ratio smallest_retained / largest_ignored."""
        if self.smallest_retained is None:
            return None
        return self.smallest_retained / max(self.largest_ignored, 1e-300)

    @property
    def classification_valid(self) -> bool:
        sep = self.separation
        return sep is not None and sep >= SEPARATION_MIN


@dataclass(frozen=True)
class PartitionResult:
    """Grouping of eigenstates into non-mixing classes, or its refutation.

    Groups are 0-based index tuples; the permutations list all indices in
    (group, energy) order, which block-diagonalizes the overlap matrix
    when a partition was found.  trivial flags the degenerate outcome of
    all-singleton groups (fully decoupled bases).
    """

    found: bool
    groups_row: tuple[tuple[int, ...], ...]
    groups_col: tuple[tuple[int, ...], ...]
    row_permutation: np.ndarray
    col_permutation: np.ndarray
    trivial: bool
    certificate: OverlapMatrix


def _degenerate_blocks(e: EigenSystem, n_levels: int) -> list[list[int]]:
    """Split 0..n_levels-1 into maximal runs of near-degenerate levels."""
    tol = DEGENERACY_TOL * e.params.omega
    blocks: list[list[int]] = [[0]]
    for k in range(1, n_levels):
        if e.energies[k] - e.energies[k - 1] < tol:
            blocks[-1].append(k)
        else:
            blocks.append([k])
    return blocks


def overlap_matrix(e1: EigenSystem, e2: EigenSystem, n_levels: int) -> OverlapMatrix:
    """Absolute overlaps between the lowest n_levels states of two bases.

    Both systems must be converged for at least n_levels and share the
    same truncation (re-diagonalize at the larger truncation first if
    they differ; see eigensystems_for_overlap).  Absolute values make the
    result independent of the eigenvector sign convention.  Degenerate
    level blocks on either side are collapsed to subspace overlaps as
    described on OverlapMatrix.
    """
    if e1.n_fock != e2.n_fock:
        raise TruncationMismatchError(
            f"n_fock mismatch: {e1.n_fock} vs {e2.n_fock}; recompute the smaller "
            "system at the larger truncation"
        )
    for name, e in (("row", e1), ("col", e2)):
        if e.converged_levels < n_levels:
            raise InsufficientConvergenceError(
                f"{name} system has {e.converged_levels} converged levels, "
                f"need {n_levels}"
            )
    v1 = e1.vectors[:, :n_levels]
    v2 = e2.vectors[:, :n_levels]
    entries = np.abs(v1.T @ v2)

    row_blocks = _degenerate_blocks(e1, n_levels)
    col_blocks = _degenerate_blocks(e2, n_levels)
    deg_rows: list[int] = []
    deg_cols: list[int] = []
    if any(len(b) > 1 for b in row_blocks) or any(len(b) > 1 for b in col_blocks):
        for rb in row_blocks:
            for cb in col_blocks:
                if len(rb) == 1 and len(cb) == 1:
                    continue
                block = v1[:, rb].T @ v2[:, cb]
                sigma_max = np.linalg.svd(block, compute_uv=False)[0]
                entries[np.ix_(rb, cb)] = sigma_max
        deg_rows = [k for b in row_blocks if len(b) > 1 for k in b]
        deg_cols = [k for b in col_blocks if len(b) > 1 for k in b]

    return OverlapMatrix(
        params_row=e1.params,
        params_col=e2.params,
        n_levels=n_levels,
        entries=entries,
        degenerate_rows=tuple(deg_rows),
        degenerate_cols=tuple(deg_cols),
    )


def classify_zeros(m: OverlapMatrix, threshold: float = ZERO_THRESHOLD) -> OverlapMatrix:
    """Mark entries below threshold as zero and record the scale certificate.

    The classification is considered valid only when the smallest retained
    entry exceeds the largest ignored one by the SEPARATION_MIN factor; an
    invalid certificate is a flagged state, not an error.
    """
    if threshold <= 0:
        raise ValueError(f"threshold must be > 0, got {threshold}")
    mask = m.entries < threshold
    largest_ignored = float(m.entries[mask].max()) if mask.any() else 0.0
    smallest_retained = float(m.entries[~mask].min()) if (~mask).any() else np.inf
    return dataclasses.replace(
        m,
        zero_threshold=threshold,
        zero_mask=mask,
        largest_ignored=largest_ignored,
        smallest_retained=smallest_retained,
    )


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[max(rx, ry)] = min(rx, ry)


def find_partition(m: OverlapMatrix) -> PartitionResult:
    """Search for a grouping of both bases with no cross-group overlap.

    Builds the bipartite graph linking row and column states through the
    retained (nonzero) entries; its connected components are the candidate
    symmetry classes.  found requires at least two components, each
    containing states from both bases.  Component order follows the
    lowest row index, and states keep energy order inside each group.
    """
    if m.zero_mask is None:
        raise ValueError("overlap matrix is unclassified; run classify_zeros first")
    if not m.classification_valid:
        raise ScaleSeparationError(
            "no certified scale separation between retained and ignored overlaps "
            f"(ratio {m.separation:.3e} < {SEPARATION_MIN:g})"
        )
    if m.params_row.g == 0 or m.params_col.g == 0:
        raise ValueError(
            "partition search at g = 0 is refused: the uncoupled point carries "
            "unrelated degeneracies that confound the grouping"
        )

    n = m.n_levels
    uf = _UnionFind(2 * n)  # rows are 0..n-1, columns n..2n-1
    finite = ~m.zero_mask
    for r, c in zip(*np.nonzero(finite)):
        uf.union(int(r), n + int(c))

    comp_rows: dict[int, list[int]] = {}
    comp_cols: dict[int, list[int]] = {}
    for r in range(n):
        comp_rows.setdefault(uf.find(r), []).append(r)
    for c in range(n):
        comp_cols.setdefault(uf.find(n + c), []).append(c)

    roots = sorted(
        set(comp_rows) | set(comp_cols),
        key=lambda root: min(
            comp_rows.get(root, [n])[0], comp_cols.get(root, [n])[0]
        ),
    )
    groups_row = tuple(tuple(comp_rows.get(root, [])) for root in roots)
    groups_col = tuple(tuple(comp_cols.get(root, [])) for root in roots)

    found = len(roots) >= 2 and all(
        comp_rows.get(root) and comp_cols.get(root) for root in roots
    )
    trivial = found and all(
        len(gr) == 1 and len(gc) == 1 for gr, gc in zip(groups_row, groups_col)
    )
    return PartitionResult(
        found=found,
        groups_row=groups_row,
        groups_col=groups_col,
        row_permutation=np.array([r for g in groups_row for r in g], dtype=int),
        col_permutation=np.array([c for g in groups_col for c in g], dtype=int),
        trivial=trivial,
        certificate=m,
    )


def synthesize_symmetry_operator(
    partition: PartitionResult, e: EigenSystem, labels
) -> OperatorMatrix:
    """Label-weighted sum of group projectors, sum_i S_i sum_j |v_j><v_j|.

    The eigensystem must be one of the two the partition was computed
    from; its own group structure (rows or columns) is used.  Restricted
    to the converged span the operator commutes with the Hamiltonian by
    construction.  A refuted partition is accepted only in the one-group
    case, where the operator degenerates to a scaled projector onto the
    span.
    """
    if not partition.found and len(partition.groups_row) != 1:
        raise ValueError("no partition found; nothing to synthesize")
    cert = partition.certificate
    if e.params == cert.params_row:
        groups = partition.groups_row
    elif e.params == cert.params_col:
        groups = partition.groups_col
    else:
        raise ValueError("eigensystem matches neither side of the partition")
    labels = [float(s) for s in labels]
    if len(labels) != len(groups):
        raise ValueError(f"need {len(groups)} labels, got {len(labels)}")
    if len(set(labels)) != len(labels):
        raise ValueError("labels must be distinct")

    op = np.zeros((e.dim, e.dim))
    for label, group in zip(labels, groups):
        v = e.vectors[:, list(group)]
        op += label * (v @ v.T)
    return OperatorMatrix(dim=e.dim, entries=op, label="S")


def eigensystems_for_overlap(
    p1: ModelParams,
    p2: ModelParams,
    n_levels: int,
    tol: float = DEFAULT_TOL,
) -> tuple[EigenSystem, EigenSystem]:
    """Two converged eigensystems brought to a common Fock truncation."""
    e1 = diagonalize_converged(p1, n_levels, tol)
    e2 = diagonalize_converged(p2, n_levels, tol)
    while e1.n_fock != e2.n_fock:
        target = max(e1.n_fock, e2.n_fock)
        if e1.n_fock < target:
            e1 = diagonalize_converged(p1, n_levels, tol, n_floor=target // 2)
        if e2.n_fock < target:
            e2 = diagonalize_converged(p2, n_levels, tol, n_floor=target // 2)
    return e1, e2


def format_overlap_table(m: OverlapMatrix, precision: int = 6) -> str:
    """Render the block in the appendix layout: 1-based index header row
    and column, entries at the given number of significant digits, and
    classified zeros printed as a bare 0."""
    n = m.n_levels
    lines = ["," + ",".join(str(j + 1) for j in range(n))]
    for i in range(n):
        cells = [str(i + 1)]
        for j in range(n):
            if m.zero_mask is not None and m.zero_mask[i, j]:
                cells.append("0")
            else:
                cells.append(f"{m.entries[i, j]:.{precision}g}")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
