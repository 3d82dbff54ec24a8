"""Characteristic function of the walk and its local estimates.

``psi(lam) = 2^-(n-1) * sum_{m in M} exp(i lam . m)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Parameters, as_lambda, increment_matrix, pair_arrays, triangles
from .errors import BadRowIndex, InvalidDelta, InvalidParameter, OutOfRegion

# absolute slack when comparing floating values against closed-form bounds
BOUND_SLACK = 1e-9


def _n_of(params) -> int:
    return params.n if isinstance(params, Parameters) else int(params)


def psi_many(n: int, lams: np.ndarray, chunk: int = 1 << 15) -> np.ndarray:
    """Vectorised psi over an array of points with last axis of length d."""
    lams = as_lambda(lams, n)
    flat = lams.reshape(-1, lams.shape[-1])
    M = increment_matrix(n).astype(float)
    out = np.empty(flat.shape[0], dtype=complex)
    for lo in range(0, flat.shape[0], chunk):
        phase = flat[lo:lo + chunk] @ M.T
        out[lo:lo + chunk] = np.exp(1j * phase).mean(axis=1)
    return out.reshape(lams.shape[:-1])


def psi(params, lam) -> complex:
    """Direct sum over the canonical increments; ``|psi| <= 1``."""
    n = _n_of(params)
    lam = as_lambda(lam, n)
    if lam.ndim != 1:
        raise InvalidParameter("psi() takes a single point; use psi_many for batches")
    return complex(psi_many(n, lam[None, :])[0])


def cubic_term(n: int, lam: np.ndarray) -> float:
    """``sum_{i<j<k} lam_ij * lam_jk * lam_ik``."""
    tri = np.array(triangles(n), dtype=np.intp).reshape(-1, 3)
    if tri.size == 0:
        return 0.0
    lam = np.asarray(lam, dtype=float)
    return float(np.sum(lam[tri[:, 0]] * lam[tri[:, 1]] * lam[tri[:, 2]]))


@dataclass(frozen=True)
class EstimateReport:
    lam: tuple[float, ...]
    delta: float
    psi: complex
    re_gauss: float
    eps1: float
    im_cubic: float
    eps2: float
    bound_eps1: float
    bound_eps2: float
    re_lower: float

    @property
    def eps1_ok(self) -> bool:
        return abs(self.eps1) <= self.bound_eps1 + BOUND_SLACK

    @property
    def eps2_ok(self) -> bool:
        return abs(self.eps2) <= self.bound_eps2 + BOUND_SLACK

    @property
    def re_lower_ok(self) -> bool:
        return self.psi.real >= self.re_lower - BOUND_SLACK

    @property
    def holds(self) -> bool:
        return self.eps1_ok and self.eps2_ok and self.re_lower_ok


def eps_bounds(n: int, delta: float) -> tuple[float, float]:
    nd4 = (n * delta) ** 4
    return nd4 / 12.0 * math.exp(0.5 * (n * delta) ** 2), nd4 / 12.0


def psi_power_real_bounds(params, lam, delta: float) -> EstimateReport:
    """Real/imaginary expansion of psi near the origin, with the error envelopes."""
    n = _n_of(params)
    if not 0.0 < delta < math.pi / 4:
        raise InvalidDelta(f"delta must lie in (0, pi/4), got {delta}")
    if n < 3:
        raise InvalidParameter("local estimates need n >= 3")
    lam = as_lambda(lam, n)
    if np.any(np.abs(lam) > delta):
        raise OutOfRegion(f"point leaves the box of half-width {delta}")
    value = psi(n, lam)
    norm2 = float(lam @ lam)
    gauss = math.exp(-0.5 * norm2)
    im_cubic = -cubic_term(n, lam)
    b1, b2 = eps_bounds(n, delta)
    return EstimateReport(
        lam=tuple(float(x) for x in lam),
        delta=delta,
        psi=value,
        re_gauss=gauss,
        eps1=value.real / gauss - 1.0,
        im_cubic=im_cubic,
        eps2=value.imag - im_cubic,
        bound_eps1=b1,
        bound_eps2=b2,
        re_lower=1.0 - 0.5 * norm2,
    )


def psi_magnitude_bound(params, lam, k: int) -> float:
    """``1/2 + 1/2 * prod_{i != k} cos(2 lam_{ik})``, an upper bound on ``|psi|^2``."""
    n = _n_of(params)
    if not 1 <= k <= n:
        raise BadRowIndex(f"row index {k} outside 1..{n}")
    lam = as_lambda(lam, n)
    I, J = pair_arrays(n)
    sel = (I == k - 1) | (J == k - 1)
    return 0.5 + 0.5 * np.prod(np.cos(2.0 * lam[..., sel]), axis=-1)


def psi_magnitude_bound_min(n: int, lam) -> np.ndarray:
    """Minimum of the row-wise magnitude bounds over every row."""
    return np.min([psi_magnitude_bound(n, lam, k) for k in range(1, n + 1)], axis=0)
