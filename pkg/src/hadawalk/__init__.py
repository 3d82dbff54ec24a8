"""Exact counts, Fourier inversion and bounds for partial Hadamard matrices
via the lattice random walk on pairwise row products."""

from .core import Parameters, increment_matrix, pair_count
from .exact import CountResult, count, count_exact_dp
from .errors import CapExceeded, HadawalkError, InvalidParameter

__all__ = [
    "CapExceeded",
    "CountResult",
    "HadawalkError",
    "InvalidParameter",
    "Parameters",
    "count",
    "count_exact_dp",
    "increment_matrix",
    "pair_count",
]
__version__ = "0.1.0"
