"""Exact computations for the rational R-matrix algebra, its vacuum module and Bethe families."""

from .qalgebra import BasisTable, State, Truncation, build_basis
from .scalars import HSeries, SpectralSeries, mpq

__version__ = "0.1.0"

__all__ = ["BasisTable", "HSeries", "SpectralSeries", "State", "Truncation", "build_basis", "mpq"]
