"""Numerical evaluation of the inversion integral of psi^t over the torus."""

from __future__ import annotations

import enum
import math
import time
from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import erf

from .charfn import psi_magnitude_bound_min, psi_many
from .core import Parameters, as_lambda, increment_matrix, pair_count
from .errors import InvalidDelta, InvalidParameter, InvalidRadius, NodeCapExceeded
from .unitset import QUARTER_PI, region_kind

DEFAULT_NODE_CAP = 10 ** 8
DEFAULT_SAMPLES = 10 ** 6
MIN_SAMPLES = 10 ** 3
SIGMA = 3.0
_CHUNK = 1 << 16


class IntegralMethod(enum.Enum):
    EXACT_GRID = "EXACT_GRID"
    MONTE_CARLO = "MONTE_CARLO"
    BOX_QUADRATURE = "BOX_QUADRATURE"


@dataclass(frozen=True)
class IntegralEstimate:
    value: complex
    method: IntegralMethod
    samples_or_nodes: int
    std_error: float = 0.0
    n: int = 0
    t: int = 0
    delta: float | None = None
    seed: int | None = None
    elapsed_ms: float = 0.0

    def to_record(self) -> dict:
        rec = {
            "method": self.method.value,
            "n": self.n,
            "t": self.t,
            "value": self.value.real,
            "imag": self.value.imag,
            "nodes_or_samples": self.samples_or_nodes,
            "elapsed_ms": round(self.elapsed_ms, 3),
        }
        if self.method is IntegralMethod.MONTE_CARLO:
            rec["std_error"] = self.std_error
            rec["seed"] = self.seed
        if self.delta is not None:
            rec["delta"] = self.delta
        return rec


def _rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator keyed by ``(seed, stream)``."""
    key = (int(seed) & ((1 << 64) - 1)) | (int(stream) << 64)
    return np.random.Generator(np.random.Philox(key=key))


def inversion_exact_grid(params: Parameters, t: int | None = None,
                         node_cap: int = DEFAULT_NODE_CAP) -> IntegralEstimate:
    """``(2 pi)^-d * int psi^t`` as the mean of psi^t over a (2t+1)^d grid.

    psi^t is a trigonometric polynomial of degree <= t in each coordinate, so
    the equispaced rule with 2t+1 nodes per axis integrates it exactly.  On
    the grid ``lam . m = 2 pi (k . m) / (2t+1)`` so phases come from an
    integer table lookup; chunk sums are combined with ``math.fsum``.
    """
    started = time.perf_counter()
    n = params.n
    t = params.t if t is None else t
    d = pair_count(n)
    if t == 0:
        return IntegralEstimate(1.0 + 0j, IntegralMethod.EXACT_GRID, 1, n=n, t=0,
                                elapsed_ms=(time.perf_counter() - started) * 1e3)
    N = 2 * t + 1
    nodes = N ** d
    if nodes > node_cap:
        raise NodeCapExceeded(f"{nodes} grid nodes exceed the cap {node_cap}")
    M = increment_matrix(n).astype(np.int64)
    roots = np.exp(2j * np.pi * np.arange(N) / N)
    radix = N ** np.arange(d - 1, -1, -1, dtype=np.int64)
    re_parts, im_parts = [], []
    for lo in range(0, nodes, _CHUNK):
        idx = np.arange(lo, min(lo + _CHUNK, nodes), dtype=np.int64)
        k = (idx[:, None] // radix) % N
        ph = (k @ M.T) % N
        vals = roots[ph].mean(axis=1) ** t
        re_parts.append(float(vals.real.sum()))
        im_parts.append(float(vals.imag.sum()))
    value = complex(math.fsum(re_parts) / nodes, math.fsum(im_parts) / nodes)
    return IntegralEstimate(value, IntegralMethod.EXACT_GRID, nodes, n=n, t=t,
                            elapsed_ms=(time.perf_counter() - started) * 1e3)


def _mc_mean(values: np.ndarray) -> tuple[complex, float]:
    mean = values.mean()
    # standard error of the complex mean: sqrt(var(re) + var(im)) / sqrt(N)
    var = values.real.var(ddof=1) + values.imag.var(ddof=1)
    return complex(mean), math.sqrt(var / values.size)


def sample_box(n: int, center, radius: float, samples: int, seed: int) -> np.ndarray:
    d = pair_count(n)
    c = np.zeros(d) if center is None else as_lambda(center, n)
    u = _rng(seed).uniform(-radius, radius, size=(samples, d))
    return c + u


def integrate_box_mc(params: Parameters, t: int | None, center, radius: float,
                     samples: int, seed: int) -> IntegralEstimate:
    """Monte Carlo estimate of ``int_{B_r(center)} psi^t`` (unnormalised)."""
    started = time.perf_counter()
    n = params.n
    t = params.t if t is None else t
    if not 0.0 < radius <= math.pi:
        raise InvalidRadius(f"radius must lie in (0, pi], got {radius}")
    if samples < MIN_SAMPLES:
        raise InvalidParameter(f"need at least {MIN_SAMPLES} samples, got {samples}")
    d = pair_count(n)
    vol = (2.0 * radius) ** d
    pts = sample_box(n, center, radius, samples, seed)
    vals = psi_many(n, pts) ** t
    mean, se = _mc_mean(vals)
    return IntegralEstimate(vol * mean, IntegralMethod.MONTE_CARLO, samples, vol * se,
                            n=n, t=t, seed=seed, elapsed_ms=(time.perf_counter() - started) * 1e3)


def residual_integral_mc(params: Parameters, t: int | None, delta: float,
                         samples: int, seed: int) -> IntegralEstimate:
    """``(2 pi)^-d * int_{R_delta} psi^t`` by rejection from the full torus."""
    started = time.perf_counter()
    n = params.n
    t = params.t if t is None else t
    if not 0.0 < delta <= QUARTER_PI:
        raise InvalidDelta(f"delta must lie in (0, pi/4], got {delta}")
    pts = sample_box(n, None, math.pi, samples, seed)
    mask = region_kind(n, pts, delta) != 0
    vals = np.zeros(samples, dtype=complex)
    if mask.any():
        vals[mask] = psi_many(n, pts[mask]) ** t
    mean, se = _mc_mean(vals)
    return IntegralEstimate(mean, IntegralMethod.MONTE_CARLO, samples, se, n=n, t=t,
                            delta=delta, seed=seed,
                            elapsed_ms=(time.perf_counter() - started) * 1e3)


@dataclass(frozen=True)
class ResidualReport:
    n: int
    t: int
    delta: float
    estimate: float          # |MC estimate| of the normalised residual integral
    std_error: float
    bound: float             # exp(-(11/24) t delta^2)
    pointwise_max: float     # max |psi|^2 over sampled residual points
    pointwise_bound: float   # cos(delta)^2
    samples: int
    seed: int

    @property
    def integral_ok(self) -> bool:
        return self.estimate - SIGMA * self.std_error <= self.bound

    @property
    def pointwise_ok(self) -> bool:
        return self.pointwise_max <= self.pointwise_bound + 1e-9

    @property
    def holds(self) -> bool:
        return self.integral_ok and self.pointwise_ok

    def to_record(self) -> dict:
        rec = asdict(self)
        rec.update(integral_ok=self.integral_ok, pointwise_ok=self.pointwise_ok)
        return rec


def residual_bound_check(params: Parameters, t: int | None, delta: float,
                         samples: int = DEFAULT_SAMPLES, seed: int = 0) -> ResidualReport:
    n = params.n
    t = params.t if t is None else t
    if not 0.0 < delta <= QUARTER_PI:
        raise InvalidDelta(f"delta must lie in (0, pi/4], got {delta}")
    est = residual_integral_mc(params, t, delta, samples, seed)
    pts = sample_box(n, None, math.pi, min(samples, 10 ** 5), seed + 1)
    pts = pts[region_kind(n, pts, delta) != 0]
    mag2 = np.abs(psi_many(n, pts)) ** 2 if len(pts) else np.zeros(1)
    return ResidualReport(
        n=n, t=t, delta=delta,
        estimate=abs(est.value), std_error=est.std_error,
        bound=math.exp(-11.0 / 24.0 * t * delta ** 2),
        pointwise_max=float(mag2.max()),
        pointwise_bound=math.cos(delta) ** 2,
        samples=samples, seed=seed,
    )


def odd_box_magnitude_max(n: int, samples: int, seed: int) -> float:
    """Largest sampled ``|psi|^2`` on quarter boxes around non-unit grid points."""
    pts = sample_box(n, None, math.pi, samples, seed)
    pts = pts[region_kind(n, pts, QUARTER_PI) == 2]
    return float((np.abs(psi_many(n, pts)) ** 2).max())


def magnitude_envelope_ok(n: int, samples: int, seed: int) -> bool:
    pts = sample_box(n, None, math.pi, samples, seed)
    return bool(np.all(np.abs(psi_many(n, pts)) ** 2 <= psi_magnitude_bound_min(n, pts) + 1e-12))


@dataclass(frozen=True)
class GaussianBox:
    lower: float
    upper: float
    value: float

    @property
    def inside(self) -> bool:
        return self.lower < self.value < self.upper


def gaussian_box_integral(d: int, t: int, delta: float) -> GaussianBox:
    """``int_{[-delta, delta]^d} exp(-(t/2)|g|^2) dg`` and its closed-form sandwich."""
    if t < 1 or delta <= 0:
        raise InvalidParameter("need t >= 1 and delta > 0")
    one_d = math.sqrt(2 * math.pi / t) * erf(delta * math.sqrt(t / 2.0))
    scale = (2 * math.pi / t) ** (d / 2)
    lower = scale * (-math.expm1(-t * delta ** 2 / 2)) ** (d / 2)
    upper = scale * (-math.expm1(-t * delta ** 2)) ** (d / 2)
    return GaussianBox(lower, upper, one_d ** d)
