"""Figure reproduction from asymrabi CSV outputs.

Renders the energy-level fan, the overlap heatmaps with their
block-permuted variants, the splitting-vs-formula comparison, and the
minimum-gap curve, purely from the CSV files the primary tool emits.  No
numerics happen here beyond axis transforms; rendering is a deterministic
function of the inputs.
"""

__version__ = "0.1.0"

from .csvio import CsvData, FigureInputError, read_csv
from .figures import FIGURES, FigureSpec, render

__all__ = [
    "CsvData",
    "FigureInputError",
    "read_csv",
    "FIGURES",
    "FigureSpec",
    "render",
]
