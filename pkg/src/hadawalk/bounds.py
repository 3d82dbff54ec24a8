"""Closed-form envelopes for the return probability and derived thresholds.

All formulas are evaluated in log space (natural logs internally, log2 on
output) so they survive step counts like n**12.  ``steps`` always means the
number of walk steps (= matrix columns); the ``t4`` entry points require a
multiple of 4 and use ``t = t4 / 4`` wherever the product formulas are
written in terms of ``t``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .core import pair_count
from .errors import BadAlphaBeta, BadDelta, BadStepCount, InvalidParameter, NoExactCount

LN2 = math.log(2.0)
SLACK = 1e-12
GRID_POINTS = 25
GOLDEN_ITERS = 3


def _check_t4(t4: int) -> None:
    if t4 <= 0 or t4 % 4:
        raise BadStepCount(f"step count must be a positive multiple of 4, got {t4}")


def _check_delta(n: int, delta: float) -> None:
    if not 0.0 < n * delta < 1.0:
        raise BadDelta(f"need n*delta in (0, 1), got {n * delta}")


def log_a(n: int, steps: float) -> float:
    """``log A(n, steps)`` with ``A = 2^(2d-n+1) (2 pi steps)^(-d/2)``."""
    d = pair_count(n)
    return (2 * d - n + 1) * LN2 - 0.5 * d * math.log(2 * math.pi * steps)


def log_u_steps(n: int, steps: float, delta: float) -> float:
    """Log of the upper product at a general step count."""
    d = pair_count(n)
    nd = n * delta
    last = -math.expm1(-steps * delta * delta)
    if last <= 0:
        return -math.inf
    return (0.5 * steps * math.log1p(nd ** 6 / 9.0)
            + steps * math.log1p(nd ** 4 / 12.0)
            + 0.5 * d * math.log(last))


def log_l_steps(n: int, steps: float, delta: float) -> float:
    """Log of the lower product at a general step count (-inf when a factor is <= 0)."""
    d = pair_count(n)
    nd = n * delta
    quartic = nd ** 4 / 12.0
    last = -math.expm1(-0.5 * steps * delta * delta)
    if quartic >= 1.0 or last <= 0:
        return -math.inf
    return (-0.5 * math.log1p(4.0 / 9.0 * steps * steps * nd ** 6)
            + steps * math.log1p(-quartic)
            + 0.5 * d * math.log(last))


def u_bound(n: int, t4: int, delta: float) -> float:
    _check_t4(t4)
    _check_delta(n, delta)
    return math.exp(log_u_steps(n, t4, delta))


def l_bound(n: int, t4: int, delta: float) -> tuple[float, bool]:
    """``(value, valid)``; ``valid`` is the gate ``t4 * (n delta)^3 < 1``."""
    _check_t4(t4)
    _check_delta(n, delta)
    return math.exp(log_l_steps(n, t4, delta)), t4 * (n * delta) ** 3 < 1.0


def residual_term(steps: float, delta: float) -> float:
    """``exp(-(11/24) steps delta^2)``; equals ``exp(-(11/6) t delta^2)`` at steps = 4t."""
    return math.exp(-11.0 / 24.0 * steps * delta * delta)


def upper_prob(n: int, t4: int, delta: float) -> float:
    return math.exp(log_a(n, t4)) * u_bound(n, t4, delta) + residual_term(t4, delta)


def lower_prob(n: int, t4: int, delta: float) -> float:
    value, _ = l_bound(n, t4, delta)
    return math.exp(log_a(n, t4)) * value - residual_term(t4, delta)


def asymptotic_log2(n: int, t4: int) -> float:
    """log2 of ``2^(2d - n + n*t4 + 1) (8 pi t)^(-d/2)`` with ``t = t4/4``."""
    _check_t4(t4)
    d = pair_count(n)
    return (2 * d - n + n * t4 + 1) - 0.5 * d * math.log2(8 * math.pi * (t4 / 4))


def asymptotic_count(n: int, t4: int) -> float:
    lg = asymptotic_log2(n, t4)
    return 2.0 ** lg if lg < 1000 else math.inf


def asymptotic_ratio(n: int, t4: int, count: int) -> float:
    """``exact / asymptotic`` computed without overflow."""
    return 2.0 ** (_log2_int(count) - asymptotic_log2(n, t4))


def _log2_int(x: int | Fraction) -> float:
    if isinstance(x, Fraction):
        return _log2_int(x.numerator) - _log2_int(x.denominator)
    if x <= 0:
        return -math.inf
    shift = max(x.bit_length() - 60, 0)
    return math.log2(x >> shift) + shift


# -- the delta sweep ------------------------------------------------------------

def delta_grid(n: int, points: int = GRID_POINTS) -> np.ndarray:
    hi = min(math.pi / 4, 0.999 / n)
    return np.geomspace(1e-3, hi, points)


def _golden(f, lo: float, hi: float, iters: int = GOLDEN_ITERS, maximize: bool = False):
    """A few golden-section steps on ``[lo, hi]``; returns (x, f(x)) of the best point seen."""
    g = (math.sqrt(5) - 1) / 2
    sign = -1.0 if maximize else 1.0
    a, b = lo, hi
    c, e = b - g * (b - a), a + g * (b - a)
    fc, fe = sign * f(c), sign * f(e)
    best = min((fc, c), (fe, e))
    for _ in range(iters):
        if fc < fe:
            b, e, fe = e, c, fc
            c = b - g * (b - a)
            fc = sign * f(c)
        else:
            a, c, fc = c, e, fe
            e = a + g * (b - a)
            fe = sign * f(e)
        best = min(best, (fc, c), (fe, e))
    return best[1], sign * best[0]


@dataclass
class SandwichRow:
    delta: float
    upper: float
    lower: float | None
    lower_valid: bool
    u_value: float
    l_value: float
    upper_ok: bool
    lower_ok: bool


@dataclass
class BoundsReport:
    n: int
    t: int
    delta: float                 # delta of the tightest upper envelope on the grid
    U: float                     # min_delta U(n,t,delta) + A^-1 exp(-(11/24) t delta^2)
    L: float                     # max over gated delta of L(n,t,delta) - A^-1 exp(...)
    A: float
    ratio_R: float | None
    asym: float
    asym_log2: float
    branching_cap: int
    lower_valid: bool
    exact_prob: Fraction | None = None
    rows: list = field(default_factory=list)
    # the residual term at ``delta`` written per step count and per t = steps/4
    residual_steps: float = 0.0
    residual_quarter: float = 0.0
    # whether the sandwich also holds with the residual scaled by (2 pi)^d
    unnormalized_holds: bool | None = None

    @property
    def holds(self) -> bool:
        rows_ok = all(r.upper_ok and r.lower_ok for r in self.rows)
        if self.ratio_R is None:
            return rows_ok
        env_ok = self.ratio_R <= self.U + SLACK and (not self.lower_valid or self.L - SLACK <= self.ratio_R)
        return rows_ok and env_ok

    def to_record(self) -> dict:
        rec = asdict(self)
        rec["exact_prob"] = None if self.exact_prob is None else str(self.exact_prob)
        rec["branching_cap"] = str(self.branching_cap)
        rec["holds"] = self.holds
        return rec


def sandwich(n: int, t4: int, exact_prob: Fraction | None = None,
             deltas: np.ndarray | None = None) -> BoundsReport:
    """Check both envelopes against an exact probability across a delta grid."""
    _check_t4(t4)
    if n < 3:
        raise InvalidParameter("the envelopes assume n >= 3")
    if exact_prob is None:
        raise NoExactCount(f"no exact probability supplied for n={n}, t={t4}")
    p = float(exact_prob)
    a = math.exp(log_a(n, t4))
    grid = delta_grid(n) if deltas is None else np.asarray(deltas, dtype=float)
    rows = []
    for dl in grid:
        dl = float(dl)
        uv = u_bound(n, t4, dl)
        lv, valid = l_bound(n, t4, dl)
        up = a * uv + residual_term(t4, dl)
        low = a * lv - residual_term(t4, dl) if valid else None
        rows.append(SandwichRow(dl, up, low, valid, uv, lv,
                                p <= up + SLACK,
                                low is None or low - SLACK <= p))

    def u_env(x):
        return u_bound(n, t4, x) + residual_term(t4, x) / a

    def l_env(x):
        v, ok = l_bound(n, t4, x)
        return v - residual_term(t4, x) / a if ok else -math.inf

    i_best = int(np.argmin([u_env(r.delta) for r in rows]))
    lo = rows[max(i_best - 1, 0)].delta
    hi = rows[min(i_best + 1, len(rows) - 1)].delta
    d_best, u_best = _golden(u_env, lo, hi)
    if u_env(rows[i_best].delta) < u_best:
        d_best, u_best = rows[i_best].delta, u_env(rows[i_best].delta)

    gated = [r for r in rows if r.lower_valid]
    if gated:
        j = int(np.argmax([l_env(r.delta) for r in gated]))
        l_best = l_env(gated[j].delta)
        lo = gated[max(j - 1, 0)].delta
        hi = gated[min(j + 1, len(gated) - 1)].delta
        _, l_ref = _golden(l_env, lo, hi, maximize=True)
        l_best = max(l_best, l_ref)
    else:
        l_best = -math.inf

    scale = (2 * math.pi) ** pair_count(n)
    unnorm = all(
        p <= a * r.u_value + scale * residual_term(t4, r.delta) + SLACK
        and (not r.lower_valid or a * r.l_value - scale * residual_term(t4, r.delta) - SLACK <= p)
        for r in rows
    )
    return BoundsReport(
        n=n, t=t4, delta=d_best, U=u_best, L=l_best, A=a,
        ratio_R=p / a, asym=asymptotic_count(n, t4), asym_log2=asymptotic_log2(n, t4),
        branching_cap=branching_bound(n), lower_valid=bool(gated),
        exact_prob=exact_prob, rows=rows,
        residual_steps=residual_term(t4, d_best),
        residual_quarter=math.exp(-11.0 / 6.0 * (t4 / 4) * d_best ** 2),
        unnormalized_holds=unnorm,
    )


# -- branching --------------------------------------------------------------------

def branching_bound(n: int) -> int:
    """``2^C(n+1, 2)``: cap on the number of n x n Hadamard matrices."""
    return 1 << pair_count(n + 1)


def branching_step_ok(n: int, p_n: Fraction, p_prev: Fraction) -> bool:
    """``P_n <= 2^-(n-1) P_{n-1}`` at a common step count ``t >= 1``.

    At ``t = 0`` every probability is 1 and the inequality fails: the
    extension argument needs the existing rows to be linearly independent.
    """
    return p_n * (1 << (n - 1)) <= p_prev


def branching_chain_ok(n: int, s: int, p_n: Fraction, p_s: Fraction) -> bool:
    """``P_n <= 2^(C(s,2) - C(n,2)) P_s`` for ``n >= s`` and ``t >= 1``."""
    return p_n * (1 << (pair_count(n) - pair_count(s))) <= p_s


def branching_step_literal(n: int, steps: int, p_n: Fraction, p_prev: Fraction) -> bool:
    """The step inequality with factor ``2^(n-1-steps)``; kept for comparison only."""
    return p_n <= Fraction(2) ** (n - 1 - steps) * p_prev


# -- thresholds ---------------------------------------------------------------------

@dataclass
class AbundanceReport:
    n: int
    t: float
    log_rhs: float           # natural log of exp(n^4 t^-1/2) + t^(d/2) exp(-(11/24) t^(1/4))
    log2_rhs: float
    first_below: float | None  # first doubling-grid t > n^8 with rhs < 1 + 1e-3
    u1_log: float            # log u1(n, t, t^(-3/8))
    u1_cap_log: float        # log of t^(d/2) exp(-(11/24) t^(1/4))
    t0: float                # stationary point (48 d / 11)^4

    @property
    def u1_ok(self) -> bool:
        return self.u1_log <= self.u1_cap_log + 1e-12


def abundance_rhs_log(n: int, t: float) -> float:
    d = pair_count(n)
    return float(np.logaddexp(n ** 4 / math.sqrt(t),
                              0.5 * d * math.log(t) - 11.0 / 24.0 * t ** 0.25))


def u1_tail_log(n: int, t: float) -> float:
    """``log[t^(d/2) exp(-(11/24) t^(1/4))]``; decreasing once t exceeds (48d/11)^4."""
    return 0.5 * pair_count(n) * math.log(t) - 11.0 / 24.0 * t ** 0.25


def abundance_threshold(n: int, t: float | None = None, target: float = 1e-3,
                        max_doublings: int = 400) -> AbundanceReport:
    if n < 3:
        raise InvalidParameter("need n >= 3")
    d = pair_count(n)
    t = float(n) ** 9 if t is None else float(t)
    first = None
    tt = float(n) ** 8
    for _ in range(max_doublings):
        tt *= 2
        if abundance_rhs_log(n, tt) < math.log1p(target):
            first = tt
            break
    lr = abundance_rhs_log(n, t)
    u1 = -log_a(n, t) - 11.0 / 24.0 * t * (t ** -0.375) ** 2
    return AbundanceReport(n=n, t=t, log_rhs=lr, log2_rhs=lr / LN2, first_below=first,
                           u1_log=u1, u1_cap_log=u1_tail_log(n, t),
                           t0=(48.0 * d / 11.0) ** 4)


@dataclass
class ExistenceReport:
    n: int
    alpha: float
    beta: float
    log_t: float
    log_delta: float
    gate_delta: bool          # delta < 1/n
    gate_cube: bool           # t (n delta)^3 < 1
    log_l: float              # log L(n, t, delta)
    log_lhs: float            # log of L(n,t,delta) - A^-1 exp(-(11/24) t delta^2) (-inf if <= 0)
    log_rhs: float            # log of exp(-n^(-2 alpha)/4) + A^-1 exp(-(11/24) n^(2+beta))
    evaluable: bool
    status: str               # HOLDS or INCONCLUSIVE

    @property
    def margin(self) -> float:
        return self.log_lhs - self.log_rhs

    def to_record(self) -> dict:
        rec = asdict(self)
        rec["margin"] = self.margin
        return rec


def _log_sub(a: float, b: float) -> float:
    """log(e^a - e^b), -inf when a <= b."""
    if a <= b:
        return -math.inf
    return a + math.log(-math.expm1(b - a))


def existence_threshold(n: int, alpha: float, beta: float) -> ExistenceReport:
    """Evaluate the existence inequality at ``t = n^(12+3b+2a)``, ``delta = n^(-5-b-a)``."""
    if not (alpha > 0 and beta > 0):
        raise BadAlphaBeta(f"alpha and beta must be positive, got {alpha}, {beta}")
    if n < 3:
        raise InvalidParameter("need n >= 3")
    d = pair_count(n)
    ln_n = math.log(n)
    log_t = (12 + 3 * beta + 2 * alpha) * ln_n
    log_delta = -(5 + beta + alpha) * ln_n
    log_nd = ln_n + log_delta
    gate_delta = log_delta < -ln_n
    gate_cube = log_t + 3 * log_nd < 0

    # pieces of log L(n, t, delta), each assembled from logs to avoid overflow
    sextic = math.exp(2 * log_t + 6 * log_nd)                 # t^2 (n delta)^6
    quartic = math.exp(4 * log_nd) / 12.0                     # (n delta)^4 / 12
    half_td2 = 0.5 * math.exp(log_t + 2 * log_delta)          # t delta^2 / 2
    log_l = (-0.5 * math.log1p(4.0 / 9.0 * sextic)
             + math.exp(log_t) * math.log1p(-quartic)
             + 0.5 * d * math.log(-math.expm1(-half_td2)))
    la = (2 * d - n + 1) * LN2 - 0.5 * d * (math.log(2 * math.pi) + log_t)
    resid = -la - 11.0 / 24.0 * math.exp(log_t + 2 * log_delta)
    log_lhs = _log_sub(log_l, resid)
    log_rhs = float(np.logaddexp(-0.25 * n ** (-2 * alpha),
                                 -la - 11.0 / 24.0 * n ** (2 + beta)))
    evaluable = all(math.isfinite(x) for x in (log_l, log_rhs)) and not math.isnan(log_lhs)
    holds = gate_delta and gate_cube and evaluable and log_lhs > log_rhs
    return ExistenceReport(n=n, alpha=alpha, beta=beta, log_t=log_t, log_delta=log_delta,
                           gate_delta=gate_delta, gate_cube=gate_cube, log_l=log_l,
                           log_lhs=log_lhs, log_rhs=log_rhs, evaluable=evaluable,
                           status="HOLDS" if holds else "INCONCLUSIVE")


CSV_COLUMNS = ("n", "t", "delta", "L", "exactR", "U", "asym_log2", "exact_log2", "branching_log2")


def csv_row(rep: BoundsReport, exact_count: int | None) -> dict:
    return {
        "n": rep.n,
        "t": rep.t,
        "delta": rep.delta,
        "L": rep.L,
        "exactR": rep.ratio_R,
        "U": rep.U,
        "asym_log2": rep.asym_log2,
        "exact_log2": _log2_int(exact_count) if exact_count else (-math.inf if exact_count == 0 else None),
        "branching_log2": pair_count(rep.n + 1),
    }
