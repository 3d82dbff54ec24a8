"""Numeric checks of the Re(z^(4t)) power inequalities and the ratio lemma."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import AlphaNotPositive, BadInput, DegenerateCase

REL_TOL = 1e-9
MAG_RANGE = (1e-200, 1e200)


class Status(enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    NOT_APPLICABLE = "NOT_APPLICABLE"


def cpow(z, k: int):
    """``z**k`` by repeated squaring; works on scalars and complex arrays."""
    result = np.ones_like(z) if isinstance(z, np.ndarray) else 1 + 0j
    base = z
    while k:
        if k & 1:
            result = result * base
        base = base * base
        k >>= 1
    return result


@dataclass(frozen=True)
class PowerBoundCase:
    z: complex
    t: int

    def __post_init__(self):
        if self.t < 1:
            raise BadInput(f"t must be >= 1, got {self.t}")

    @property
    def power(self) -> int:
        return 4 * self.t

    @property
    def beta(self) -> float:
        if self.z.real == 0:
            raise DegenerateCase("beta undefined when Re(z) = 0")
        return self.z.imag / self.z.real

    @property
    def alpha(self) -> float:
        return 1.0 - math.comb(self.power, 2) * self.beta ** 2

    def zpow(self) -> complex:
        mag = abs(self.z) ** self.power
        if not MAG_RANGE[0] <= mag <= MAG_RANGE[1]:
            raise DegenerateCase(f"|z|^{self.power} = {mag:g} outside the safe range")
        return cpow(complex(self.z), self.power)


def _close(a: float, b: float, tol: float = REL_TOL) -> bool:
    return abs(a - b) <= tol * max(abs(a), abs(b), 1e-300)


def check_identity_part1(case: PowerBoundCase) -> bool:
    """Squared-modulus identity, plus the upper bound it implies."""
    beta = case.beta
    w = case.zpow()
    if w.real == 0:
        raise DegenerateCase("Re(z^(4t)) = 0")
    t = case.t
    lhs = (w.real * math.sqrt(1.0 + (w.imag / w.real) ** 2)) ** 2
    upper = case.z.real ** case.power * (1.0 + beta ** 2) ** (2 * t)
    return _close(lhs, upper ** 2) and w.real <= upper * (1 + REL_TOL)


@dataclass(frozen=True)
class LowerPartsReport:
    status: Status
    alpha: float
    re_positive: bool = False
    ratio_ok: bool = False
    lower_ok: bool = False
    re_power: float = math.nan
    lower: float = math.nan
    upper: float = math.nan

    @property
    def holds(self) -> bool:
        return self.status is Status.PASS


def lower_bound_value(case: PowerBoundCase) -> float:
    beta, alpha, k = case.beta, case.alpha, case.power
    return case.z.real ** k * (1 + beta ** 2) ** (2 * case.t) * (1 + (k / alpha) ** 2 * beta ** 2) ** -0.5


def check_lower_parts(case: PowerBoundCase, strict: bool = False) -> LowerPartsReport:
    """Positivity, the Im/Re ratio bound and the lower bound, when alpha > 0.

    With ``strict`` a non-positive alpha raises; otherwise the report is
    NOT_APPLICABLE.
    """
    alpha = case.alpha
    if alpha <= 0:
        if strict:
            raise AlphaNotPositive(f"alpha = {alpha} <= 0")
        return LowerPartsReport(Status.NOT_APPLICABLE, alpha)
    beta, k = case.beta, case.power
    w = case.zpow()
    re_pos = w.real > 0
    ratio_ok = re_pos and (w.imag / w.real) ** 2 <= (k / alpha) ** 2 * beta ** 2 * (1 + REL_TOL) + 1e-300
    low = lower_bound_value(case)
    up = case.z.real ** k * (1 + beta ** 2) ** (2 * case.t)
    lower_ok = w.real >= low * (1 - REL_TOL)
    ok = re_pos and ratio_ok and lower_ok and w.real <= up * (1 + REL_TOL)
    return LowerPartsReport(Status.PASS if ok else Status.FAIL, alpha, re_pos, ratio_ok,
                            lower_ok, w.real, low, up)


def check_ratio_lemma(lambdas, As, Bs) -> bool:
    lam = np.asarray(lambdas, dtype=float)
    a = np.asarray(As, dtype=float)
    b = np.asarray(Bs, dtype=float)
    if not (lam.shape == a.shape == b.shape) or lam.ndim != 1 or lam.size == 0:
        raise BadInput("lambdas, As and Bs must be equal-length non-empty sequences")
    if np.any(lam <= 0) or np.any(a <= 0) or np.any(b < 0):
        raise BadInput("need lambdas > 0, As > 0, Bs >= 0")
    r = b / a
    mix = float(lam @ b) / float(lam @ a)
    lo, hi = float(r.min()), float(r.max())
    tol = REL_TOL * max(abs(hi), 1.0)
    return lo - tol <= mix <= hi + tol


# -- randomized suite -----------------------------------------------------------------

@dataclass
class SuiteReport:
    cases: int
    part1_violations: int
    lower_violations: int
    ratio_violations: int
    ratio_cases: int

    @property
    def holds(self) -> bool:
        return self.part1_violations == 0 and self.lower_violations == 0 and self.ratio_violations == 0


def _random_alpha_positive(rng: np.random.Generator, cases: int):
    """Cases with log|z| in [-2, 2], t in 1..5 and |beta| chosen so alpha > 0."""
    t = rng.integers(1, 6, size=cases)
    k = 4 * t
    cmax = k * (k - 1) / 2
    beta = rng.uniform(-1, 1, size=cases) * 0.999 / np.sqrt(cmax)
    r = np.exp(rng.uniform(-2, 2, size=cases))
    sign = np.where(rng.random(cases) < 0.5, -1.0, 1.0)
    re = sign * r / np.sqrt(1 + beta ** 2)
    z = re + 1j * re * beta
    return z, t


def _powers(z: np.ndarray, k: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    for kk in np.unique(k):
        sel = k == kk
        out[sel] = cpow(z[sel], int(kk))
    return out


def run_suite(cases: int = 10 ** 5, seed: int = 0, ratio_cases: int = 10 ** 4) -> SuiteReport:
    rng = np.random.Generator(np.random.Philox(key=seed))

    # part (i): arbitrary argument, |Re z| > 1e-6
    t1 = rng.integers(1, 6, size=cases)
    k1 = 4 * t1
    z1 = np.exp(rng.uniform(-2, 2, size=cases) + 1j * rng.uniform(-np.pi, np.pi, size=cases))
    keep = (np.abs(z1.real) > 1e-6)
    w1 = _powers(z1, k1)
    keep &= w1.real != 0
    z1, k1, t1, w1 = z1[keep], k1[keep], t1[keep], w1[keep]
    beta1 = z1.imag / z1.real
    lhs = (w1.real * np.sqrt(1 + (w1.imag / w1.real) ** 2)) ** 2
    upper1 = z1.real ** k1 * (1 + beta1 ** 2) ** (2 * t1)
    bad1 = ~(np.abs(lhs - upper1 ** 2) <= REL_TOL * np.maximum(np.abs(lhs), np.abs(upper1 ** 2)))
    bad1 |= w1.real > upper1 * (1 + REL_TOL)

    # parts (ii)-(iv) on the alpha > 0 domain
    z2, t2 = _random_alpha_positive(rng, cases)
    k2 = 4 * t2
    w2 = _powers(z2, k2)
    beta2 = z2.imag / z2.real
    alpha2 = 1 - k2 * (k2 - 1) / 2 * beta2 ** 2
    base = z2.real ** k2 * (1 + beta2 ** 2) ** (2 * t2)
    low2 = base * (1 + (k2 / alpha2) ** 2 * beta2 ** 2) ** -0.5
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = (w2.imag / w2.real) ** 2
    bad2 = ~(alpha2 > 0) | ~(w2.real > 0)
    bad2 |= ratio > (k2 / alpha2) ** 2 * beta2 ** 2 * (1 + REL_TOL) + 1e-300
    bad2 |= w2.real < low2 * (1 - REL_TOL)
    bad2 |= w2.real > base * (1 + REL_TOL)

    # ratio lemma on random instances of size <= 20
    ratio_bad = 0
    for _ in range(ratio_cases):
        s = int(rng.integers(1, 21))
        lam = rng.uniform(0.01, 10, size=s)
        a = rng.uniform(0.01, 10, size=s)
        b = rng.uniform(0, 10, size=s)
        ratio_bad += not check_ratio_lemma(lam, a, b)

    return SuiteReport(cases, int(bad1.sum()), int(bad2.sum()), ratio_bad, ratio_cases)
