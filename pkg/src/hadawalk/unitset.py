"""The set of unit-modulus points of psi and its graph structure.

Points of the quarter-phase grid are stored as digit tuples: digit ``k`` in a
coordinate stands for ``k * pi/2`` (with 3 read as ``-pi/2``).  Any digit
vector splits uniquely into a ``{0, pi}`` part (digits 0/2) plus a
``{0, pi/2}`` part (digits 0/1); the second part defines a graph on the rows
whose edges are the pairs carrying a 1.  A point has ``|psi| = 1`` exactly
when that graph has every degree even.

Exact membership uses integer phase arithmetic: on the grid, ``lam . m`` is a
multiple of ``pi/2``, so ``psi`` is the average of ``i**k(m)`` with
``k(m) = sum_c digit_c * m_c (mod 4)``, and ``|psi| = 1`` iff ``k`` is
constant over the increments.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator

import numpy as np

from .core import Parameters, flatten, increment_matrix, pair_arrays, pair_count, pairs
from .errors import CapExceeded, InvalidDelta, InvalidParameter, NotEvenDegree

HALF_PI = math.pi / 2
QUARTER_PI = math.pi / 4

MAX_LAMBDA_N = 8
MAX_MATERIALIZE_N = 5
MAX_SCAN_N = 5
# bit-plane packing stores one bit per increment in a uint64
MAX_PLANE_N = 6

UNIT_TOL = 1e-12


class ParityClass(enum.Enum):
    IN_LAMBDA1 = "L1"
    IN_LAMBDA2_EVEN = "L2even"
    IN_LAMBDA2_ODD = "L2odd"
    COMPOSITE = "composite"


@dataclass(frozen=True, order=True)
class QuarterPhasePoint:
    digits: tuple[int, ...]

    def __post_init__(self):
        if any(dg not in (0, 1, 2, 3) for dg in self.digits):
            raise InvalidParameter(f"digits must lie in 0..3: {self.digits}")

    @property
    def n(self) -> int:
        d = len(self.digits)
        n = int((1 + math.isqrt(1 + 8 * d)) // 2)
        if pair_count(n) != d:
            raise InvalidParameter(f"{d} digits is not a pair count")
        return n

    @property
    def parity_class(self) -> ParityClass:
        return classify(self)

    def values(self) -> np.ndarray:
        """Coordinates in ``[-pi, pi]``."""
        return np.array([(-HALF_PI if dg == 3 else dg * HALF_PI) for dg in self.digits])

    def split(self) -> tuple["QuarterPhasePoint", "QuarterPhasePoint"]:
        """Unique ``(pi-part, half-pi-part)`` with digits in {0,2} and {0,1}."""
        low = tuple(dg & 1 for dg in self.digits)
        high = tuple((dg - lo) % 4 for dg, lo in zip(self.digits, low))
        return QuarterPhasePoint(high), QuarterPhasePoint(low)

    def code(self) -> str:
        return "".join(str(dg) for dg in self.digits)

    def __add__(self, other: "QuarterPhasePoint") -> "QuarterPhasePoint":
        return QuarterPhasePoint(tuple((a + b) % 4 for a, b in zip(self.digits, other.digits)))


@dataclass(frozen=True)
class PairGraph:
    n: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        norm = set()
        for e in self.edges:
            i, j = sorted(e)
            if not 1 <= i < j <= self.n:
                raise InvalidParameter(f"bad edge {e} for n={self.n}")
            norm.add((i, j))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def triangle(cls, n: int, a: int, b: int, c: int) -> "PairGraph":
        return cls(n, frozenset({(a, b), (b, c), (a, c)}))

    @classmethod
    def from_mask(cls, n: int, mask: int) -> "PairGraph":
        return cls(n, frozenset((p.i, p.j) for p in pairs(n) if (mask >> p.flat) & 1))

    def mask(self) -> int:
        return sum(1 << flatten(i, j, self.n) for i, j in self.edges)

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)

    def degrees(self) -> list[int]:
        deg = [0] * (self.n + 1)
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg[1:]

    def is_even(self) -> bool:
        return all(x % 2 == 0 for x in self.degrees())

    def neighbors(self, v: int) -> list[int]:
        return sorted(j if i == v else i for i, j in self.edges if v in (i, j))

    def __xor__(self, other: "PairGraph") -> "PairGraph":
        return PairGraph(self.n, self.edges ^ other.edges)


def graph_of(point: QuarterPhasePoint) -> PairGraph:
    """Graph on the rows with an edge wherever the half-pi part has a 1."""
    _, low = point.split()
    n = point.n
    return PairGraph(n, frozenset((p.i, p.j) for p in pairs(n) if low.digits[p.flat]))


def classify(point: QuarterPhasePoint) -> ParityClass:
    digs = set(point.digits)
    if digs <= {0, 2}:
        return ParityClass.IN_LAMBDA1
    if digs <= {0, 1}:
        if graph_of(point).is_even():
            return ParityClass.IN_LAMBDA2_EVEN
        return ParityClass.IN_LAMBDA2_ODD
    return ParityClass.COMPOSITE


def triangle_point(n: int, a: int, b: int, c: int) -> QuarterPhasePoint:
    digits = [0] * pair_count(n)
    for i, j in ((a, b), (b, c), (a, c)):
        digits[flatten(i, j, n)] = 1
    return QuarterPhasePoint(tuple(digits))


def triangle_decompose(g: PairGraph) -> list[tuple[int, int, int]]:
    """Triples whose triangles XOR to ``g``.

    Greedy: take the smallest vertex of degree >= 2 and its two smallest
    neighbours, XOR that triangle away, repeat.  Each step removes at least
    one edge and keeps every degree even.
    """
    if not g.is_even():
        odd = [v for v, x in enumerate(g.degrees(), start=1) if x % 2]
        raise NotEvenDegree(f"vertices {odd} have odd degree")
    out = []
    cur = g
    while cur.edges:
        deg = cur.degrees()
        a = next(v for v in range(1, g.n + 1) if deg[v - 1] >= 2)
        b, c = cur.neighbors(a)[:2]
        out.append(tuple(sorted((a, b, c))))
        cur = cur ^ PairGraph.triangle(g.n, a, b, c)
    return out


def xor_triangles(n: int, triples: Iterable[tuple[int, int, int]]) -> PairGraph:
    g = PairGraph(n)
    for a, b, c in triples:
        g = g ^ PairGraph.triangle(n, a, b, c)
    return g


# -- exact phase arithmetic -------------------------------------------------

def phase_vectors(n: int, digits: np.ndarray) -> np.ndarray:
    """``k(m) = digits . m (mod 4)`` for every canonical increment ``m``.

    ``digits`` has shape (..., d); result has shape (..., 2^(n-1)).
    """
    M = increment_matrix(n).astype(np.int64)
    return (np.asarray(digits, dtype=np.int64) @ M.T) % 4


def in_lambda_exact(point: QuarterPhasePoint) -> bool:
    k = phase_vectors(point.n, np.array(point.digits))
    return bool(np.all(k == k[0]))


def psi_exact(point: QuarterPhasePoint) -> complex:
    """psi evaluated with exact quarter-turn phases (returned as complex)."""
    k = phase_vectors(point.n, np.array(point.digits))
    counts = np.bincount(k, minlength=4)
    re = (counts[0] - counts[2]) / k.size
    im = (counts[1] - counts[3]) / k.size
    return complex(re, im)


def _pack_planes(k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Pack phase vectors (values 0..3, last axis <= 64) into (low, high) bit planes."""
    w = np.uint64(1) << np.arange(k.shape[-1], dtype=np.uint64)
    lo = ((k & 1).astype(np.uint64) * w).sum(axis=-1, dtype=np.uint64)
    hi = (((k >> 1) & 1).astype(np.uint64) * w).sum(axis=-1, dtype=np.uint64)
    return lo, hi


def mask_digits(masks: np.ndarray, d: int, value: int) -> np.ndarray:
    """Expand d-bit masks into digit arrays with ``value`` where a bit is set."""
    masks = np.asarray(masks, dtype=np.int64)
    bits = (masks[:, None] >> np.arange(d, dtype=np.int64)) & 1
    return (bits * value).astype(np.int8)


@lru_cache(maxsize=None)
def even_graph_masks(n: int) -> np.ndarray:
    """d-bit edge masks of every even-degree graph on n vertices.

    Edges avoiding vertex 1 are free; the edge ``{1, j}`` is then forced so
    that vertex ``j`` has even degree, and vertex 1 follows automatically.
    """
    if n > MAX_LAMBDA_N:
        raise CapExceeded(f"n={n} exceeds {MAX_LAMBDA_N}")
    inner = [p for p in pairs(n) if p.i > 1]
    spoke = {p.j: p.flat for p in pairs(n) if p.i == 1}
    k = len(inner)
    free = np.arange(1 << k, dtype=np.int64)
    masks = np.zeros_like(free)
    parity = np.zeros((n + 1, free.size), dtype=np.int64)
    for bit, p in enumerate(inner):
        on = (free >> bit) & 1
        masks |= on << p.flat
        parity[p.i] ^= on
        parity[p.j] ^= on
    for j in range(2, n + 1):
        masks |= parity[j] << spoke[j]
    masks.setflags(write=False)
    return masks


def _degrees_parity(n: int, masks: np.ndarray) -> np.ndarray:
    I, J = pair_arrays(n)
    d = pair_count(n)
    bits = (np.asarray(masks, dtype=np.int64)[:, None] >> np.arange(d)) & 1
    par = np.zeros((bits.shape[0], n), dtype=np.int64)
    for c in range(d):
        par[:, I[c]] ^= bits[:, c]
        par[:, J[c]] ^= bits[:, c]
    return par


def is_even_mask(n: int, masks: np.ndarray) -> np.ndarray:
    return ~np.any(_degrees_parity(n, masks), axis=1)


@dataclass(frozen=True)
class LambdaStats:
    n: int
    size: int
    lambda2_even: int
    histogram: dict  # {"+1": count, "+i": ..., "-1": ..., "-i": ...}
    all_unit: bool
    scanned: int = 0            # candidates visited by the exhaustive scan (0 = skipped)
    scan_unit: int = 0          # unit-modulus points found by the scan
    scan_matches: bool = True   # scan found exactly the constructed set

    def expected_size(self) -> int:
        d = pair_count(self.n)
        return 2 ** (2 * d - self.n + 1)

    def expected_bucket(self) -> int:
        d = pair_count(self.n)
        return 2 ** (2 * d - self.n - 1)


_BUCKETS = ("+1", "+i", "-1", "-i")


def _check_plane_cap(n: int) -> None:
    if n > MAX_PLANE_N:
        raise CapExceeded(f"n={n} exceeds the bit-plane cap {MAX_PLANE_N}")


def lambda_statistics(n: int, scan: bool | None = None) -> LambdaStats:
    """Construct the unit set as pi-part + even half-pi part and check it exactly.

    Each point's phase vector is the mod-4 sum of its two parts' phase
    vectors; the point is unit-modulus iff that sum is constant.  With
    ``scan`` (default for n <= 5) every one of the ``4^d`` grid points is
    tested the same way and the unit-modulus ones are compared against the
    construction.
    """
    if n < 2:
        raise InvalidParameter("n must be >= 2")
    _check_plane_cap(n)
    d = pair_count(n)
    if scan is None:
        scan = n <= MAX_SCAN_N
    if scan and n > MAX_SCAN_N:
        raise CapExceeded(f"exhaustive scan is capped at n={MAX_SCAN_N}")
    all_ones = np.uint64((1 << (1 << (n - 1))) - 1) if n < 7 else np.uint64(0xFFFFFFFFFFFFFFFF)

    pi_masks = np.arange(1 << d, dtype=np.int64)
    lo1, hi1 = _pack_planes(phase_vectors(n, mask_digits(pi_masks, d, 2)))
    even = even_graph_masks(n)
    lo2, hi2 = _pack_planes(phase_vectors(n, mask_digits(even, d, 1)))

    hist = np.zeros(4, dtype=np.int64)
    all_unit = True
    for b in range(even.size):
        lo = lo1 ^ lo2[b]
        hi = hi1 ^ hi2[b] ^ (lo1 & lo2[b])
        unit = ((lo == 0) | (lo == all_ones)) & ((hi == 0) | (hi == all_ones))
        all_unit &= bool(unit.all())
        expo = (lo & np.uint64(1)).astype(np.int64) + 2 * (hi & np.uint64(1)).astype(np.int64)
        hist += np.bincount(expo, minlength=4)

    scanned = scan_unit = 0
    matches = True
    if scan:
        half_masks = np.arange(1 << d, dtype=np.int64)
        lo3, hi3 = _pack_planes(phase_vectors(n, mask_digits(half_masks, d, 1)))
        even_set = np.zeros(1 << d, dtype=bool)
        even_set[even] = True
        for b in range(half_masks.size):
            lo = lo1 ^ lo3[b]
            hi = hi1 ^ hi3[b] ^ (lo1 & lo3[b])
            unit = ((lo == 0) | (lo == all_ones)) & ((hi == 0) | (hi == all_ones))
            cnt = int(unit.sum())
            scanned += unit.size
            scan_unit += cnt
            # the constructed set contains all pi-parts for an even graph, none otherwise
            if even_set[b]:
                matches &= cnt == unit.size
            else:
                matches &= cnt == 0

    return LambdaStats(
        n=n,
        size=int(pi_masks.size * even.size),
        lambda2_even=int(even.size),
        histogram={k: int(v) for k, v in zip(_BUCKETS, hist)},
        all_unit=all_unit,
        scanned=scanned,
        scan_unit=scan_unit,
        scan_matches=matches,
    )


def iter_lambda(n: int) -> Iterator[QuarterPhasePoint]:
    """Lazily yield every unit-modulus grid point (pi-part + even half-pi part)."""
    if n > MAX_LAMBDA_N:
        raise CapExceeded(f"n={n} exceeds {MAX_LAMBDA_N}")
    d = pair_count(n)
    for b in even_graph_masks(n):
        b = int(b)
        for a in range(1 << d):
            yield QuarterPhasePoint(tuple(((2 * ((a >> c) & 1)) + ((b >> c) & 1)) % 4 for c in range(d)))


def enumerate_lambda(params, max_n: int = MAX_MATERIALIZE_N) -> list[QuarterPhasePoint]:
    """All unit-modulus grid points in lexicographic digit order."""
    n = params.n if isinstance(params, Parameters) else int(params)
    if n > min(max_n, MAX_LAMBDA_N):
        raise CapExceeded(f"materialising the unit set is capped at n={min(max_n, MAX_LAMBDA_N)}")
    return sorted(iter_lambda(n))


def enumerate_lambda2_even(n: int) -> list[QuarterPhasePoint]:
    d = pair_count(n)
    return sorted(QuarterPhasePoint(tuple(int(x) for x in row))
                  for row in mask_digits(even_graph_masks(n), d, 1))


def psi_on_lambda_multiset(params) -> dict:
    """Histogram of psi over the unit set, keyed by '+1', '+i', '-1', '-i'."""
    n = params.n if isinstance(params, Parameters) else int(params)
    if n > MAX_LAMBDA_N:
        raise CapExceeded(f"n={n} exceeds {MAX_LAMBDA_N}")
    return lambda_statistics(n, scan=False).histogram


def psi_bucket(value: complex, tol: float = 1e-9) -> str:
    for name, ref in zip(_BUCKETS, (1, 1j, -1, -1j)):
        if abs(value - ref) < tol:
            return name
    raise ValueError(f"{value} is not a fourth root of unity")


# -- decomposition of the residual region ------------------------------------

def nearest_grid(gammas: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split points into grid digits and offsets in ``[-pi/4, pi/4)``."""
    g = np.asarray(gammas, dtype=float)
    k = np.floor(g / HALF_PI + 0.5)
    offset = g - k * HALF_PI
    return (k.astype(np.int64) % 4), offset


def region_kind(n: int, gammas: np.ndarray, delta: float) -> np.ndarray:
    """0 = inside a primary box B_delta(lam) with lam in the unit set,
    1 = punctured box around a unit point, 2 = full box around a non-unit point."""
    digits, offset = nearest_grid(gammas)
    low = digits & 1
    d = pair_count(n)
    masks = (low.reshape(-1, d) << np.arange(d, dtype=np.int64)).sum(axis=1)
    even = is_even_mask(n, masks).reshape(digits.shape[:-1])
    near = np.max(np.abs(offset), axis=-1) <= delta
    out = np.full(even.shape, 2, dtype=np.int8)
    out[even & near] = 0
    out[even & ~near] = 1
    return out


def in_residual(n: int, gammas: np.ndarray, delta: float) -> np.ndarray:
    return region_kind(n, gammas, delta) != 0


@dataclass(frozen=True)
class RegionDecomposition:
    n: int
    delta: float
    punctured: tuple[QuarterPhasePoint, ...]   # centres in the unit set
    full: tuple[QuarterPhasePoint, ...]        # centres outside it

    @property
    def box_count(self) -> int:
        return len(self.punctured) + len(self.full)

    def locate(self, gamma) -> tuple[QuarterPhasePoint, str]:
        """Centre of the quarter box holding ``gamma`` and the piece kind."""
        digits, _ = nearest_grid(np.asarray(gamma, dtype=float))
        kind = int(region_kind(self.n, np.asarray(gamma, dtype=float)[None, :], self.delta)[0])
        return QuarterPhasePoint(tuple(int(x) for x in digits)), ("primary", "punctured", "full")[kind]


def residual_region_decomposition(params, delta: float) -> RegionDecomposition:
    n = params.n if isinstance(params, Parameters) else int(params)
    if not 0.0 < delta < QUARTER_PI:
        raise InvalidDelta(f"delta must lie in (0, pi/4), got {delta}")
    if n > MAX_SCAN_N:
        raise CapExceeded(f"box listing has 4^d entries; capped at n={MAX_SCAN_N}")
    d = pair_count(n)
    unit = set(iter_lambda(n))
    punctured, full = [], []
    for digs in itertools.product(range(4), repeat=d):
        p = QuarterPhasePoint(digs)
        (punctured if p in unit else full).append(p)
    return RegionDecomposition(n, delta, tuple(punctured), tuple(full))


def dump_lambda(n: int) -> Iterator[str]:
    """One line per unit point: digit string, class tag, psi value."""
    for p in enumerate_lambda(n):
        val = psi_exact(p)
        yield f"{p.code()} {classify(p).value} {psi_bucket(val)}"
