"""Acceptance checks: one printed PASS/FAIL line per criterion.

Each check also enforces its wall-clock budget.
"""

import math
import time
from fractions import Fraction

import pytest

from hadawalk.appendix import run_suite
from hadawalk.bounds import (
    asymptotic_ratio,
    branching_bound,
    branching_chain_ok,
    branching_step_ok,
    existence_threshold,
    sandwich,
)
from hadawalk.core import Parameters
from hadawalk.exact import brute_force_count, closed_form_prob, count_closed_form, count_exact_dp
from hadawalk.integral import inversion_exact_grid, residual_bound_check
from hadawalk.unitset import lambda_statistics
from hadawalk.walksim import SimConfig, simulate_return_prob

# exact counts shared between criteria 1, 2 and 8
COUNTS: dict = {}


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail, elapsed, budget):
        ok = bool(ok) and elapsed <= budget
        line = f"ACCEPTANCE {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail} [{elapsed:.2f}s / {budget:g}s]"
        with capsys.disabled():
            print("\n" + line)
        assert ok, line
    return emit


def _dp(n, t, **caps):
    res = count_exact_dp(Parameters(n, t), **caps)
    COUNTS[(n, t)] = res.matrix_count
    return res


def test_01_closed_forms(report):
    start = time.perf_counter()
    mismatches = []
    for n in (2, 3):
        for t in (4, 8, 12, 16):
            dp = _dp(n, t).matrix_count
            closed = count_closed_form(Parameters(n, t)).matrix_count
            if dp != closed:
                mismatches.append((n, t))
    # the C(t,2) two-row reading only matches at t = 4
    literal_hits = [t for t in (4, 8, 12, 16)
                    if closed_form_prob(2, t, literal_n2=True) * 2 ** (2 * t) == COUNTS[(2, t)]]
    detail = f"{8 - len(mismatches)}/8 exact matches; C(t,2) two-row form matches only at t={literal_hits}"
    report(1, "closed forms vs DP", not mismatches, detail, time.perf_counter() - start, 10)


def test_02_brute_force(report):
    start = time.perf_counter()
    cells = [(n, t) for n in range(2, 21) for t in range(0, 20 // n + 1)]
    bad = []
    for n, t in cells:
        dp = _dp(n, t, max_n=20).matrix_count
        if brute_force_count(Parameters(n, t)).matrix_count != dp:
            bad.append((n, t))
    ok = not bad and COUNTS[(4, 4)] == 768
    detail = f"{len(cells) - len(bad)}/{len(cells)} cells equal, N(4,4)={COUNTS[(4, 4)]}"
    report(2, "brute force vs DP (n*t <= 20)", ok, detail, time.perf_counter() - start, 60)


def test_03_inversion_grid(report):
    start = time.perf_counter()
    cases = [(n, t) for n in (2, 3) for t in range(0, 13)] + [(4, 8)]
    worst = 0.0
    bad = []
    for n, t in cases:
        exact = count_exact_dp(Parameters(n, t)).return_prob
        val = inversion_exact_grid(Parameters(n, t)).value
        p = float(exact)
        err = abs(val - p) / p if p else abs(val)
        worst = max(worst, err)
        if err > 1e-10:
            bad.append((n, t))
    detail = f"{len(cases) - len(bad)}/{len(cases)} within 1e-10, worst error {worst:.1e}"
    report(3, "exact-grid inversion vs exact P", not bad, detail, time.perf_counter() - start, 300)


def test_04_unit_set(report):
    start = time.perf_counter()
    parts = []
    ok = True
    for n in range(3, 7):
        st = lambda_statistics(n)
        good = (st.size == st.expected_size()
                and st.lambda2_even == 2 ** ((n - 1) * (n - 2) // 2)
                and set(st.histogram.values()) == {st.expected_bucket()}
                and st.all_unit)
        if n <= 5:
            good = good and st.scanned > 0 and st.scan_matches and st.scan_unit == st.size
        ok &= good
        parts.append(f"n={n}:|L|={st.size}{'+scan' if st.scanned else ''}")
    report(4, "unit-modulus set structure", ok, ", ".join(parts), time.perf_counter() - start, 120)


def test_05_sandwich(report):
    start = time.perf_counter()
    parts = []
    ok = True
    for n in (3, 4):
        for t4 in (8, 16):
            rep = sandwich(n, t4, count_exact_dp(Parameters(n, t4)).return_prob)
            ok &= rep.holds
            parts.append(f"({n},{t4}) {rep.L:.3g}<={rep.ratio_R:.3f}<={rep.U:.3g}")
    report(5, "U/L sandwich against exact P", ok, "; ".join(parts), time.perf_counter() - start, 60)


def test_06_asymptotic_trend(report):
    start = time.perf_counter()
    ratios = {}
    for t4 in (16, 40, 80, 160):
        count = closed_form_prob(3, t4) * 2 ** (3 * t4)
        ratios[t4] = asymptotic_ratio(3, t4, int(count))
    gaps = [abs(r - 1) for r in ratios.values()]
    ok = 0.9 <= ratios[40] <= 1.1 and all(a > b for a, b in zip(gaps, gaps[1:]))
    detail = ", ".join(f"t={k}:{v:.4f}" for k, v in ratios.items())
    report(6, "exact/asymptotic ratio trend, n=3", ok, detail, time.perf_counter() - start, 10)


def test_07_residual(report):
    start = time.perf_counter()
    parts = []
    ok = True
    for n, t, delta in ((3, 8, 0.6), (4, 16, 0.4)):
        rep = residual_bound_check(Parameters(n, t), None, delta, samples=10 ** 6, seed=2024)
        ok &= rep.integral_ok
        parts.append(f"({n},{t},{delta}) {rep.estimate:.2e}-3*{rep.std_error:.1e} <= {rep.bound:.3f}")
    report(7, "residual-region bound (MC, 1e6 samples)", ok, "; ".join(parts), time.perf_counter() - start, 120)


def test_08_branching(report):
    start = time.perf_counter()
    if not COUNTS:
        for n in (2, 3):
            for t in (4, 8, 12, 16):
                _dp(n, t)
        for n in range(2, 21):
            for t in range(0, 20 // n + 1):
                _dp(n, t, max_n=20)
    probs = {k: Fraction(v, 2 ** (k[0] * k[1])) for k, v in COUNTS.items()}
    steps = chains = caps = 0
    ok = True
    for (n, t), p in probs.items():
        if t == 0:
            continue
        if (n - 1, t) in probs and n >= 3:
            ok &= branching_step_ok(n, p, probs[(n - 1, t)])
            steps += 1
        for s in range(2, n):
            if (s, t) in probs:
                ok &= branching_chain_ok(n, s, p, probs[(s, t)])
                chains += 1
        if t == n:
            ok &= COUNTS[(n, t)] <= branching_bound(n)
            caps += 1
    detail = f"{steps} step, {chains} chain and {caps} cap inequalities (t >= 1; t = 0 is outside the domain)"
    report(8, "branching bound on exact counts", ok and caps > 0, detail, time.perf_counter() - start, 1)


def test_09_appendix(report):
    start = time.perf_counter()
    rep = run_suite(10 ** 5, seed=17)
    detail = (f"{rep.cases} cases: part (i) {rep.part1_violations}, parts (ii)-(iv) {rep.lower_violations}, "
              f"ratio lemma {rep.ratio_violations}/{rep.ratio_cases} violations")
    report(9, "appendix inequalities", rep.holds, detail, time.perf_counter() - start, 30)


def test_10_simulation(report):
    start = time.perf_counter()
    parts = []
    ok = True
    for n, t in ((3, 4), (3, 8), (4, 8)):
        res = simulate_return_prob(SimConfig(n, t, 10 ** 6, seed=99))
        p = float(count_exact_dp(Parameters(n, t)).return_prob)
        z = abs(res.estimate - p) / res.stderr
        ok &= z <= 4
        parts.append(f"({n},{t}) {res.estimate:.5f} vs {p:.5f} ({z:.2f} se)")
    report(10, "simulation vs exact P (1e6 chains)", ok, "; ".join(parts), time.perf_counter() - start, 120)


def test_11_existence_threshold(report):
    start = time.perf_counter()
    ok = True
    statuses = {}
    for n in (3, 10, 100, 1000):
        rep = existence_threshold(n, 0.1, 0.1)
        gates = rep.gate_delta and rep.gate_cube
        consistent = (not gates or rep.evaluable) and (rep.status != "HOLDS" or rep.margin > 0)
        ok &= gates and consistent and math.isfinite(rep.log_rhs)
        statuses[n] = rep.status
    detail = "log-space evaluation, gates imply evaluability; " + ", ".join(f"n={k}:{v}" for k, v in statuses.items())
    report(11, "existence-threshold substitute", ok, detail, time.perf_counter() - start, 1)
