import numpy as np
import pytest

from hadawalk.errors import BudgetExceeded, InvalidParameter
from hadawalk.exact import cached_prob
from hadawalk.walksim import SimConfig, increment_moment_check, simulate_return_prob


@pytest.mark.parametrize("n,t", [(2, 4), (3, 4), (3, 8), (4, 8)])
def test_concordance_with_exact(n, t):
    res = simulate_return_prob(SimConfig(n, t, 200000, seed=11))
    p = float(cached_prob(n, t))
    assert abs(res.estimate - p) <= 4 * res.stderr


def test_impossible_returns_have_no_hits():
    assert simulate_return_prob(SimConfig(3, 5, 20000, seed=0)).hits == 0
    assert simulate_return_prob(SimConfig(3, 0, 10, seed=0)).hits == 10


def test_determinism_and_record():
    a = simulate_return_prob(SimConfig(3, 8, 70000, seed=5))
    b = simulate_return_prob(SimConfig(3, 8, 70000, seed=5))
    c = simulate_return_prob(SimConfig(3, 8, 70000, seed=6))
    assert a.hits == b.hits
    assert a.hits != c.hits
    rec = a.to_record()
    assert set(rec) == {"n", "t", "chains", "hits", "estimate", "stderr", "seed", "elapsed_ms"}


def test_threads_do_not_change_result(monkeypatch):
    base = simulate_return_prob(SimConfig(4, 8, 150000, seed=2)).hits
    monkeypatch.setenv("HW_THREADS", "3")
    assert simulate_return_prob(SimConfig(4, 8, 150000, seed=2)).hits == base


def test_config_validation():
    with pytest.raises(BudgetExceeded):
        SimConfig(3, 10 ** 5, 10 ** 6)
    with pytest.raises(InvalidParameter):
        SimConfig(3, 4, 0)
    with pytest.raises(InvalidParameter):
        SimConfig(1, 4, 10)


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_increment_moments(n):
    checks = increment_moment_check(n, 100000, seed=n)
    assert [c.order for c in checks] == [1, 2, 3]
    assert all(c.ok for c in checks), checks


def test_moments_at_fixed_point():
    lam = np.array([0.3, -0.2, 0.5])
    checks = increment_moment_check(3, 50000, seed=0, lam=lam)
    assert checks[1].expected == pytest.approx(0.38)
    assert checks[2].expected == pytest.approx(6 * 0.3 * -0.2 * 0.5)
    assert all(c.ok for c in checks)
