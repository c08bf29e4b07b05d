"""Numerical toolkit for the asymmetric quantum Rabi model.

A qubit coupled to a single oscillator mode, with a bias term that breaks
the parity symmetry of the symmetric model.  The package provides exact
diagonalization in a truncated Fock basis with automatic truncation
control, eigenbasis-overlap matrices and symmetry-partition search,
a generalized-RWA effective two-level model, level-crossing refinement,
and minimum-gap scans over the coupling/gap parameter plane.
"""

__version__ = "0.1.0"

from .model import (
    ModelParams,
    TruncatedBasis,
    OperatorMatrix,
    build_hamiltonian,
    build_parity,
    commutator_norm,
)
from .eigen import EigenSystem, diagonalize, diagonalize_converged
from .spectra import (
    LevelSweep,
    CrossingReport,
    sweep_levels,
    gap_curve,
    refine_crossing,
    baseline_energies,
)
from .overlap import (
    OverlapMatrix,
    PartitionResult,
    overlap_matrix,
    classify_zeros,
    find_partition,
    synthesize_symmetry_operator,
    eigensystems_for_overlap,
    format_overlap_table,
)
from .perturb import (
    EffectivePair,
    laguerre,
    dtilde,
    effective_splitting,
    locate_exact_pair,
    predicted_crossings,
)
from .scan import GapScanResult, min_gap_scan, epsilon_sweep

__all__ = [
    "ModelParams",
    "TruncatedBasis",
    "OperatorMatrix",
    "build_hamiltonian",
    "build_parity",
    "commutator_norm",
    "EigenSystem",
    "diagonalize",
    "diagonalize_converged",
    "LevelSweep",
    "CrossingReport",
    "sweep_levels",
    "gap_curve",
    "refine_crossing",
    "baseline_energies",
    "OverlapMatrix",
    "PartitionResult",
    "overlap_matrix",
    "classify_zeros",
    "find_partition",
    "synthesize_symmetry_operator",
    "eigensystems_for_overlap",
    "format_overlap_table",
    "EffectivePair",
    "laguerre",
    "dtilde",
    "effective_splitting",
    "locate_exact_pair",
    "predicted_crossings",
    "GapScanResult",
    "min_gap_scan",
    "epsilon_sweep",
]
