"""Monte Carlo simulation of the increment walk.

Each chain draws ``t`` increments uniformly from the canonical set and
records whether the sum is the origin.  Chains run in fixed-size blocks;
block ``b`` uses a Philox stream keyed by ``(seed, b)``, so results depend
only on the seed and not on how the work is split.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .core import Parameters, increment_matrix, pair_count, triangles
from .errors import BudgetExceeded, InvalidParameter

BLOCK = 1 << 16
MAX_WORK = 10 ** 10


def _rng(seed: int, stream: int) -> np.random.Generator:
    key = (int(seed) & ((1 << 64) - 1)) | (int(stream) << 64)
    return np.random.Generator(np.random.Philox(key=key))


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("HW_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class SimConfig:
    n: int
    t: int
    chains: int
    seed: int = 0

    def __post_init__(self):
        Parameters(self.n, self.t)
        if self.chains < 1:
            raise InvalidParameter("need at least one chain")
        if self.chains * max(self.t, 1) > MAX_WORK:
            raise BudgetExceeded(f"chains * t = {self.chains * self.t} exceeds {MAX_WORK}")


@dataclass(frozen=True)
class SimResult:
    n: int
    t: int
    chains: int
    hits: int
    estimate: float
    stderr: float
    seed: int
    elapsed_ms: float

    def to_record(self) -> dict:
        rec = asdict(self)
        rec["elapsed_ms"] = round(self.elapsed_ms, 3)
        return rec


def _block_hits(M: np.ndarray, t: int, size: int, seed: int, block: int) -> int:
    rng = _rng(seed, block)
    pos = np.zeros((size, M.shape[1]), dtype=np.int16)
    for _ in range(t):
        pos += M[rng.integers(0, M.shape[0], size=size)]
    return int(np.count_nonzero(~pos.any(axis=1)))


def simulate_return_prob(cfg: SimConfig) -> SimResult:
    started = time.perf_counter()
    if cfg.t == 0:
        hits = cfg.chains
    else:
        M = increment_matrix(cfg.n).astype(np.int16)
        sizes = [min(BLOCK, cfg.chains - lo) for lo in range(0, cfg.chains, BLOCK)]
        jobs = [(M, cfg.t, s, cfg.seed, b) for b, s in enumerate(sizes)]
        workers = thread_count()
        if workers > 1:
            with ThreadPoolExecutor(workers) as ex:
                hits = sum(ex.map(lambda a: _block_hits(*a), jobs))
        else:
            hits = sum(_block_hits(*a) for a in jobs)
    p = hits / cfg.chains
    se = math.sqrt(p * (1 - p) / cfg.chains)
    return SimResult(cfg.n, cfg.t, cfg.chains, hits, p, se, cfg.seed,
                     (time.perf_counter() - started) * 1e3)


@dataclass(frozen=True)
class MomentCheck:
    order: int
    sample_mean: float
    stderr: float
    expected: float

    @property
    def ok(self) -> bool:
        return abs(self.sample_mean - self.expected) <= 5 * self.stderr + 1e-12


def increment_moment_check(n: int, samples: int, seed: int, lam=None) -> list[MomentCheck]:
    """First three moments of ``lam . m`` for m uniform on the increments.

    Expected values are 0, ``|lam|^2`` and ``6 * sum over triangles of
    lam_ij lam_jk lam_ik``.
    """
    d = pair_count(n)
    rng = _rng(seed, 0)
    lam = rng.uniform(-1, 1, size=d) if lam is None else np.asarray(lam, dtype=float)
    M = increment_matrix(n)
    x = M.astype(float) @ lam
    draws = x[_rng(seed, 1).integers(0, M.shape[0], size=samples)]
    tri = sum(lam[a] * lam[b] * lam[c] for a, b, c in triangles(n))
    expected = (0.0, float(lam @ lam), float(6.0 * tri))
    out = []
    for k, e in enumerate(expected, start=1):
        v = draws ** k
        out.append(MomentCheck(k, float(v.mean()), float(v.std(ddof=1) / math.sqrt(samples)), e))
    return out
