"""Named verification suites; each returns a list of pass/fail checks."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import appendix, bounds, charfn, exact, integral, unitset, walksim
from .core import Parameters, pair_count


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    ok: bool
    detail: str = ""

    def to_record(self) -> dict:
        return {"suite": self.suite, "check": self.name, "ok": self.ok, "detail": self.detail}


def lambda_suite(n: int) -> list[Check]:
    s = "lambda"
    d = pair_count(n)
    st = unitset.lambda_statistics(n)
    out = [
        Check(s, "size", st.size == st.expected_size(), f"{st.size} vs {st.expected_size()}"),
        Check(s, "lambda2_even", st.lambda2_even == 2 ** pair_count(n - 1),
              f"{st.lambda2_even} vs {2 ** pair_count(n - 1)}"),
        Check(s, "psi_histogram", all(v == st.expected_bucket() for v in st.histogram.values()),
              " ".join(f"{k}:{v}" for k, v in st.histogram.items())),
        Check(s, "all_unit", st.all_unit),
    ]
    if st.scanned:
        out.append(Check(s, "exhaustive_scan", st.scan_matches and st.scan_unit == st.size,
                         f"{st.scan_unit} unit points in {st.scanned}"))
    masks = np.arange(1 << d, dtype=np.int64)
    even = unitset.is_even_mask(n, masks)
    out.append(Check(s, "even_graph_count", int(even.sum()) == st.lambda2_even))
    if n <= unitset.MAX_SCAN_N:
        exact_member = np.array([unitset.in_lambda_exact(unitset.QuarterPhasePoint(tuple(int(x) for x in row)))
                                 for row in unitset.mask_digits(masks, d, 1)])
        out.append(Check(s, "even_equals_exact_membership", bool(np.array_equal(even, exact_member))))
    bad = 0
    for m in unitset.even_graph_masks(n):
        g = unitset.PairGraph.from_mask(n, int(m))
        bad += unitset.xor_triangles(n, unitset.triangle_decompose(g)).mask() != g.mask()
    out.append(Check(s, "triangle_decomposition", bad == 0, f"{bad} mismatches"))
    return out


def charfn_suite(n: int, delta: float | None = None, samples: int = 2000, seed: int = 0) -> list[Check]:
    s = "charfn"
    delta = delta if delta is not None else 0.5 / n
    rng = np.random.Generator(np.random.Philox(key=seed))
    d = pair_count(n)
    pts = rng.uniform(-delta, delta, size=(samples, d))
    # corners are the worst case for the quartic terms
    pts[: min(samples, 64)] = delta * np.where(rng.random((min(samples, 64), d)) < 0.5, -1.0, 1.0)
    bad1 = bad2 = bad3 = 0
    for lam in pts:
        rep = charfn.psi_power_real_bounds(n, lam, delta)
        bad1 += not rep.eps1_ok
        bad2 += not rep.eps2_ok
        bad3 += not rep.re_lower_ok
    torus = rng.uniform(-math.pi, math.pi, size=(samples, d))
    env = np.abs(charfn.psi_many(n, torus)) ** 2 <= charfn.psi_magnitude_bound_min(n, torus) + 1e-12
    return [
        Check(s, "eps1", bad1 == 0, f"{bad1} of {samples}"),
        Check(s, "eps2", bad2 == 0, f"{bad2} of {samples}"),
        Check(s, "re_lower", bad3 == 0, f"{bad3} of {samples}"),
        Check(s, "magnitude_envelope", bool(env.all()), f"{int((~env).sum())} of {samples}"),
    ]


def sandwich_suite(n: int, t: int) -> list[Check]:
    rep = bounds.sandwich(n, t, exact.cached_prob(n, t))
    up = sum(not r.upper_ok for r in rep.rows)
    lo = sum(not r.lower_ok for r in rep.rows)
    return [
        Check("sandwich", "upper", up == 0, f"{up} of {len(rep.rows)} deltas violate"),
        Check("sandwich", "lower", lo == 0, f"{lo} of {sum(r.lower_valid for r in rep.rows)} gated deltas violate"),
        Check("sandwich", "envelope", rep.holds, f"L={rep.L:.6g} R={rep.ratio_R:.6g} U={rep.U:.6g}"),
    ]


def residual_suite(n: int, t: int, delta: float, samples: int, seed: int) -> list[Check]:
    rep = integral.residual_bound_check(Parameters(n, t), t, delta, samples, seed)
    return [
        Check("residual", "integral", rep.integral_ok,
              f"{rep.estimate:.3e} +- {rep.std_error:.1e} vs {rep.bound:.3e}"),
        Check("residual", "pointwise", rep.pointwise_ok,
              f"{rep.pointwise_max:.6f} vs {rep.pointwise_bound:.6f}"),
    ]


def inversion_suite(n: int, t: int) -> list[Check]:
    est = integral.inversion_exact_grid(Parameters(n, t))
    p = float(exact.cached_prob(n, t))
    err = abs(est.value - p)
    ok = err <= 1e-10 * p if p else err <= 1e-10
    return [Check("inversion", "grid_vs_exact", ok, f"{est.value.real:.17g} vs {p:.17g}")]


def branching_suite(n: int, t: int) -> list[Check]:
    out = []
    probs = {k: exact.cached_prob(k, t) for k in range(2, n + 1)}
    for k in range(3, n + 1):
        out.append(Check("branching", f"step_{k}", bounds.branching_step_ok(k, probs[k], probs[k - 1])))
    if t == n:
        count = probs[n] * (1 << (n * t))
        out.append(Check("branching", "cap", count <= bounds.branching_bound(n), f"{count} <= 2^{pair_count(n + 1)}"))
    return out


def appendix_suite(samples: int, seed: int) -> list[Check]:
    rep = appendix.run_suite(samples, seed)
    return [
        Check("appendix", "part_i", rep.part1_violations == 0, f"{rep.part1_violations} violations"),
        Check("appendix", "parts_ii_iv", rep.lower_violations == 0, f"{rep.lower_violations} violations"),
        Check("appendix", "ratio_lemma", rep.ratio_violations == 0, f"{rep.ratio_violations} violations"),
    ]


def simulate_suite(n: int, t: int, chains: int, seed: int) -> list[Check]:
    res = walksim.simulate_return_prob(walksim.SimConfig(n, t, chains, seed))
    p = float(exact.cached_prob(n, t))
    z = abs(res.estimate - p) / res.stderr if res.stderr else (0.0 if res.estimate == p else math.inf)
    mom = walksim.increment_moment_check(n, min(chains, 10 ** 5), seed)
    return [Check("simulate", "concordance", z <= 4, f"{res.estimate:.6g} vs {p:.6g} ({z:.2f} se)")] + [
        Check("simulate", f"moment_{m.order}", m.ok, f"{m.sample_mean:.5g} vs {m.expected:.5g}") for m in mom
    ]


SUITES = ("lambda", "charfn", "sandwich", "residual", "inversion", "branching", "appendix", "simulate")
