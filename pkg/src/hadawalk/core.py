"""Index scheme and value types shared by every module.

Pair coordinates are ordered lexicographically on ``(i, j)`` with
``1 <= i < j <= n``; ``flatten``/``unflatten`` convert between that pair and
its position in a length-``d`` vector.  Sign vectors are stored as bit masks
where a set bit ``k`` means ``y_{k+1} = -1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import CapExceeded, DimensionMismatch, InvalidParameter

MAX_ENUM_N = 24


def pair_count(n: int) -> int:
    return n * (n - 1) // 2


@dataclass(frozen=True)
class Parameters:
    n: int
    t: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise InvalidParameter(f"n must be >= 2, got {self.n}")
        if self.t < 0:
            raise InvalidParameter(f"t must be >= 0, got {self.t}")

    @property
    def d(self) -> int:
        return pair_count(self.n)


@dataclass(frozen=True)
class PairIndex:
    i: int
    j: int
    flat: int


def flatten(i: int, j: int, n: int) -> int:
    """Position of the pair ``{i, j}`` (1-based rows, any order) in a length-d vector."""
    if i > j:
        i, j = j, i
    if not 1 <= i < j <= n:
        raise InvalidParameter(f"bad pair ({i}, {j}) for n={n}")
    # pairs with first row < i come first
    before = (i - 1) * n - (i - 1) * i // 2
    return before + (j - i - 1)


def unflatten(flat: int, n: int) -> tuple[int, int]:
    if not 0 <= flat < pair_count(n):
        raise InvalidParameter(f"flat index {flat} out of range for n={n}")
    i = 1
    row_len = n - 1
    while flat >= row_len:
        flat -= row_len
        i += 1
        row_len -= 1
    return i, i + 1 + flat


@lru_cache(maxsize=None)
def pairs(n: int) -> tuple[PairIndex, ...]:
    out = []
    k = 0
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            out.append(PairIndex(i, j, k))
            k += 1
    return tuple(out)


@lru_cache(maxsize=None)
def pair_arrays(n: int) -> tuple[np.ndarray, np.ndarray]:
    """0-based row index arrays ``(I, J)`` of length d in flat order."""
    ps = pairs(n)
    return (np.array([p.i - 1 for p in ps], dtype=np.intp),
            np.array([p.j - 1 for p in ps], dtype=np.intp))


@lru_cache(maxsize=None)
def triangles(n: int) -> tuple[tuple[int, int, int], ...]:
    """Flat indices ``({i,j}, {j,k}, {i,k})`` for every triple i<j<k."""
    out = []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            for k in range(j + 1, n + 1):
                out.append((flatten(i, j, n), flatten(j, k, n), flatten(i, k, n)))
    return tuple(out)


@dataclass(frozen=True)
class SignVector:
    bits: int
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise InvalidParameter("dimension must be positive")
        if self.bits < 0 or self.bits >> self.n:
            raise InvalidParameter(f"bits {self.bits:#x} exceed dimension {self.n}")

    @classmethod
    def from_signs(cls, signs: Sequence[int]) -> "SignVector":
        bits = 0
        for k, s in enumerate(signs):
            if s == -1:
                bits |= 1 << k
            elif s != 1:
                raise InvalidParameter(f"sign entries must be +-1, got {s}")
        return cls(bits, len(signs))

    def signs(self) -> tuple[int, ...]:
        return tuple(-1 if (self.bits >> k) & 1 else 1 for k in range(self.n))

    def negate(self) -> "SignVector":
        return SignVector(self.bits ^ ((1 << self.n) - 1), self.n)


@dataclass(frozen=True)
class IncrementVector:
    coords: tuple[int, ...]

    def triangle_consistent(self, n: int) -> bool:
        return is_triangle_consistent(self.coords, n)


def is_triangle_consistent(coords: Sequence[int], n: int) -> bool:
    """True iff every triple satisfies ``c_ij * c_jk * c_ik == 1``."""
    if len(coords) != pair_count(n):
        raise DimensionMismatch(f"expected {pair_count(n)} coordinates, got {len(coords)}")
    return all(coords[a] * coords[b] * coords[c] == 1 for a, b, c in triangles(n))


@dataclass(frozen=True)
class LatticePoint:
    coords: tuple[int, ...]

    def consistent_with_step(self, t: int) -> bool:
        """Range and parity invariant of a walk position after ``t`` steps."""
        return all(abs(c) <= t and (c - t) % 2 == 0 for c in self.coords)


@dataclass(frozen=True)
class TorusPoint:
    coords: tuple[float, ...]

    def __post_init__(self):
        for c in self.coords:
            if not -math.pi <= c <= math.pi:
                raise InvalidParameter(f"torus coordinate {c} outside [-pi, pi]")

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype or float)


def as_lambda(lam: "TorusPoint | Iterable[float] | np.ndarray", n: int) -> np.ndarray:
    """Coerce a point (or an array of points, last axis = d) to float64."""
    arr = np.asarray(lam, dtype=float)
    if arr.shape[-1:] != (pair_count(n),):
        raise DimensionMismatch(f"expected last dimension {pair_count(n)}, got shape {arr.shape}")
    return arr


def z_map(y: SignVector) -> IncrementVector:
    s = y.signs()
    return IncrementVector(tuple(s[p.i - 1] * s[p.j - 1] for p in pairs(y.n)))


def _check_enum_cap(n: int) -> None:
    if n < 2:
        raise InvalidParameter(f"n must be >= 2, got {n}")
    if n > MAX_ENUM_N:
        raise CapExceeded(f"n={n} exceeds the enumeration cap {MAX_ENUM_N}")


@lru_cache(maxsize=8)
def _increment_matrix(n: int) -> np.ndarray:
    rows = np.arange(1 << (n - 1), dtype=np.int64)
    # canonical representative: y_1 = +1, bit k of the row index flips y_{k+2}
    shifts = np.arange(n - 1, dtype=np.int64)
    tail = 1 - 2 * ((rows[:, None] >> shifts) & 1)
    y = np.concatenate([np.ones((rows.size, 1), dtype=np.int8), tail.astype(np.int8)], axis=1)
    I, J = pair_arrays(n)
    m = np.ascontiguousarray(y[:, I] * y[:, J])
    m.setflags(write=False)
    return m


def increment_matrix(n: int) -> np.ndarray:
    """All ``2^(n-1)`` increments as a read-only int8 array of shape (2^(n-1), d).

    Row ``r`` is ``Z(y)`` for ``y_1 = +1`` and ``y_{k+2} = -1`` iff bit ``k`` of ``r`` is set.
    """
    _check_enum_cap(n)
    return _increment_matrix(n)


def enumerate_increments(n: int) -> list[IncrementVector]:
    """The increment set M in canonical order (distinct elements)."""
    return [IncrementVector(tuple(int(v) for v in row)) for row in increment_matrix(n)]
