"""Exact counts of partial Hadamard matrices and walk return probabilities.

The walk state is a length-d integer vector.  States are packed into a
single Python int: coordinate ``c`` lives in byte field ``c`` with an offset
of ``t`` so every field stays in ``[0, 2t]``.  A step then adds the signed
packed increment to the key directly, so convolution is one dict pass per
increment.  Counts are Python ints; probabilities are ``Fraction``.
"""

from __future__ import annotations

import enum
import itertools
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .core import LatticePoint, Parameters, increment_matrix, pair_count
from .errors import CapExceeded, MemoryBudgetExceeded, UnsupportedN, UnsupportedT

DEFAULT_MAX_N = 6
DEFAULT_MAX_T = 32
DEFAULT_STATE_BUDGET = 1 << 22
FIELD_BITS = 8
BRUTE_FORCE_MAX_CELLS = 20


class Method(enum.Enum):
    DP = "DP"
    CLOSED_FORM_N2 = "CLOSED_FORM_N2"
    CLOSED_FORM_N3 = "CLOSED_FORM_N3"
    BRUTE_FORCE = "BRUTE_FORCE"


@dataclass(frozen=True)
class CountResult:
    n: int
    t: int
    matrix_count: int
    return_prob: Fraction
    method: Method
    wall_time_ms: float = 0.0

    def to_record(self) -> dict:
        return {
            "n": self.n,
            "t": self.t,
            "count": str(self.matrix_count),
            "prob_num": str(self.return_prob.numerator),
            "prob_den": str(self.return_prob.denominator),
            "method": self.method.value,
            "wall_time_ms": round(self.wall_time_ms, 3),
        }


def _result(n: int, t: int, count: int, method: Method, started: float) -> CountResult:
    return CountResult(n, t, count, Fraction(count, 1 << (n * t)), method,
                       (time.perf_counter() - started) * 1e3)


@dataclass
class WalkDistribution:
    n: int
    step: int
    mass: dict  # packed state key -> path count
    offset: int

    @property
    def d(self) -> int:
        return pair_count(self.n)

    @property
    def origin_key(self) -> int:
        return _origin_key(self.d, self.offset)

    def origin_mass(self) -> int:
        return self.mass.get(self.origin_key, 0)

    def total_mass(self) -> int:
        return sum(self.mass.values())

    def unpack(self, key: int) -> LatticePoint:
        return LatticePoint(_unpack(key, self.d, self.offset))

    def points(self) -> dict:
        """Mapping ``LatticePoint -> count`` (materialised; small cases only)."""
        return {self.unpack(k): v for k, v in self.mass.items()}


def _origin_key(d: int, offset: int) -> int:
    key = 0
    for c in range(d):
        key |= offset << (FIELD_BITS * c)
    return key


def _unpack(key: int, d: int, offset: int) -> tuple[int, ...]:
    mask = (1 << FIELD_BITS) - 1
    return tuple(((key >> (FIELD_BITS * c)) & mask) - offset for c in range(d))


def _pack_increments(n: int) -> list[int]:
    M = increment_matrix(n)
    d = M.shape[1]
    # little-endian bytes: field c is byte c
    plus = (M == 1).astype(np.uint8).tobytes()
    minus = (M == -1).astype(np.uint8).tobytes()
    frm = int.from_bytes
    return [frm(plus[lo:lo + d], "little") - frm(minus[lo:lo + d], "little")
            for lo in range(0, len(plus), d)]


def _check_caps(n: int, t: int, max_n: int, max_t: int) -> None:
    if n < 2:
        raise UnsupportedN(f"n must be >= 2, got {n}")
    if n > max_n:
        raise CapExceeded(f"n={n} exceeds the exact-count cap {max_n}")
    if t > max_t:
        raise CapExceeded(f"t={t} exceeds the step cap {max_t}")
    if 2 * max_t + 1 >= 1 << FIELD_BITS:
        raise CapExceeded("step cap too large for the packed state layout")


def walk_distribution(params: Parameters, t: int | None = None, *, offset: int | None = None,
                      max_n: int = DEFAULT_MAX_N, max_t: int = DEFAULT_MAX_T,
                      state_budget: int = DEFAULT_STATE_BUDGET) -> WalkDistribution:
    """Path counts of the walk over canonical increments after ``t`` steps."""
    n = params.n
    t = params.t if t is None else t
    offset = t if offset is None else offset
    _check_caps(n, max(t, offset), max_n, max_t)
    d = pair_count(n)
    mass = {_origin_key(d, offset): 1}
    if t == 0:
        return WalkDistribution(n, 0, mass, offset)
    incs = _pack_increments(n)
    for _ in range(t):
        nxt: dict = {}
        get = nxt.get
        for key, cnt in mass.items():
            for inc in incs:
                k2 = key + inc
                nxt[k2] = get(k2, 0) + cnt
            if len(nxt) > state_budget:
                raise MemoryBudgetExceeded(f"live states exceeded {state_budget}")
        mass = nxt
    return WalkDistribution(n, t, mass, offset)


def origin_paths(params: Parameters, **caps) -> int:
    """Number of t-step canonical-increment paths returning to the origin.

    Splits the walk into halves: paths back to 0 are pairs (x after the
    first half, -x after the second), so only ceil(t/2) steps are expanded.
    """
    n, t = params.n, params.t
    _check_caps(n, t, caps.get("max_n", DEFAULT_MAX_N), caps.get("max_t", DEFAULT_MAX_T))
    h1 = (t + 1) // 2
    h2 = t - h1
    first = walk_distribution(params, h1, offset=h1, **caps)
    if h2 == h1:
        second = first
    else:
        second = walk_distribution(params, h2, offset=h1, **caps)
    d = pair_count(n)
    origin2 = 2 * _origin_key(d, h1)
    total = 0
    for key, cnt in first.mass.items():
        # x + y = 0 with both offset by h1  <=>  key_y = 2*origin - key_x
        other = second.mass.get(origin2 - key)
        if other:
            total += cnt * other
    return total


def count_exact_dp(params: Parameters, **caps) -> CountResult:
    """N_{n,t} = (origin paths over canonical increments) * 2^t."""
    started = time.perf_counter()
    paths = origin_paths(params, **caps)
    return _result(params.n, params.t, paths << params.t, Method.DP, started)


def return_probability(params: Parameters, **caps) -> Fraction:
    return count_exact_dp(params, **caps).return_prob


# -- closed forms -------------------------------------------------------------

def closed_form_prob(n: int, t: int, literal_n2: bool = False) -> Fraction:
    """Return probability from the product formulas for two and three rows.

    For two rows the walk is the simple +-1 walk, which returns with
    probability ``C(t, t/2) / 2^t``.  ``literal_n2`` selects the alternative
    ``C(t, 2) / 2^t`` form instead; it agrees only at ``t = 4``.
    """
    if n not in (2, 3):
        raise UnsupportedN(f"closed forms exist only for n in (2, 3), got {n}")
    if t % 4:
        raise UnsupportedT(f"closed forms are stated at multiples of 4, got t={t}")
    if n == 2:
        num = math.comb(t, 2) if literal_n2 else math.comb(t, t // 2)
        return Fraction(num, 1 << t)
    s = t // 4
    return Fraction(math.factorial(t) // math.factorial(s) ** 4, 1 << (2 * t))


def count_closed_form(params: Parameters, literal_n2: bool = False, **caps) -> CountResult:
    """Closed form at multiples of 4; other t fall back to the DP."""
    started = time.perf_counter()
    n, t = params.n, params.t
    if n not in (2, 3):
        raise UnsupportedN(f"closed forms exist only for n in (2, 3), got {n}")
    if t % 4:
        return count_exact_dp(params, **caps)
    p = closed_form_prob(n, t, literal_n2)
    count = p * (1 << (n * t))
    assert count.denominator == 1
    method = Method.CLOSED_FORM_N2 if n == 2 else Method.CLOSED_FORM_N3
    return _result(n, t, int(count), method, started)


# -- brute force --------------------------------------------------------------

def _popcount(x: int) -> int:
    return bin(x).count("1")


def brute_force_count(params: Parameters, max_cells: int = BRUTE_FORCE_MAX_CELLS) -> CountResult:
    """Count n x t +-1 matrices with pairwise orthogonal rows by direct search.

    Rows are t-bit masks; two rows are orthogonal iff they differ in exactly
    t/2 positions.  Ordered row tuples are counted by depth-first extension
    over the orthogonality graph, which visits every admissible matrix once.
    """
    started = time.perf_counter()
    n, t = params.n, params.t
    if n * t > max_cells:
        raise CapExceeded(f"n*t={n * t} exceeds the brute-force cap {max_cells}")
    rows = range(1 << t)
    if t % 2:
        count = (1 << t) if n == 1 else 0
        return _result(n, t, count, Method.BRUTE_FORCE, started)
    half = t // 2
    adj = {r: [s for s in rows if _popcount(r ^ s) == half] for r in rows}

    def extend(chosen: list[int]) -> int:
        if len(chosen) == n:
            return 1
        last = chosen[-1]
        total = 0
        for s in adj[last]:
            if all(_popcount(s ^ c) == half for c in chosen[:-1]):
                chosen.append(s)
                total += extend(chosen)
                chosen.pop()
        return total

    if t == 0:
        count = 1
    else:
        count = sum(extend([r]) for r in rows)
    return _result(n, t, count, Method.BRUTE_FORCE, started)


def brute_force_scan(params: Parameters, max_cells: int = 16) -> int:
    """Literal scan of all 2^(nt) sign matrices (tiny sizes only)."""
    n, t = params.n, params.t
    if n * t > max_cells:
        raise CapExceeded(f"n*t={n * t} exceeds the literal-scan cap {max_cells}")
    if t == 0:
        return 1
    total = 0
    for cells in itertools.product((1, -1), repeat=n * t):
        A = np.array(cells).reshape(n, t)
        G = A @ A.T
        if np.count_nonzero(G - np.diag(np.diag(G))) == 0:
            total += 1
    return total


def count(params: Parameters, method: str = "auto", **caps) -> CountResult:
    """Dispatch on ``method``: auto, dp, closed, brute."""
    if method == "dp":
        return count_exact_dp(params, **caps)
    if method == "closed":
        return count_closed_form(params, **caps)
    if method == "brute":
        return brute_force_count(params)
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    if params.n in (2, 3) and params.t % 4 == 0:
        return count_closed_form(params)
    return count_exact_dp(params, **caps)


@lru_cache(maxsize=256)
def cached_prob(n: int, t: int) -> Fraction:
    """Exact return probability, closed form where available, else DP."""
    return count(Parameters(n, t), max_n=max(DEFAULT_MAX_N, n), max_t=max(DEFAULT_MAX_T, t)).return_prob
