import math

import pytest

from hadawalk.core import Parameters
from hadawalk.errors import InvalidDelta, InvalidParameter, InvalidRadius, NodeCapExceeded
from hadawalk.exact import cached_prob
from hadawalk.integral import (
    IntegralMethod,
    gaussian_box_integral,
    integrate_box_mc,
    inversion_exact_grid,
    magnitude_envelope_ok,
    odd_box_magnitude_max,
    residual_bound_check,
    residual_integral_mc,
)


@pytest.mark.parametrize("n,t", [(2, 2), (2, 6), (3, 4), (3, 6), (3, 8)])
def test_grid_matches_exact(n, t):
    est = inversion_exact_grid(Parameters(n, t))
    p = float(cached_prob(n, t))
    assert abs(est.value.real - p) <= 1e-12 * max(p, 1)
    assert abs(est.value.imag) < 1e-12
    assert est.samples_or_nodes == (2 * t + 1) ** (n * (n - 1) // 2)


def test_grid_known_values():
    assert inversion_exact_grid(Parameters(3, 4)).value.real == pytest.approx(0.09375, abs=1e-15)
    assert inversion_exact_grid(Parameters(2, 2)).value.real == pytest.approx(0.5, abs=1e-15)
    assert abs(inversion_exact_grid(Parameters(3, 5)).value) < 1e-12
    assert inversion_exact_grid(Parameters(4, 0)).value == 1


def test_grid_node_cap():
    with pytest.raises(NodeCapExceeded):
        inversion_exact_grid(Parameters(5, 4), node_cap=10 ** 6)


def test_box_mc_full_torus():
    est = integrate_box_mc(Parameters(3, 4), None, None, math.pi, 200000, seed=0)
    scale = (2 * math.pi) ** 3
    assert abs(est.value / scale - 0.09375) <= 4 * est.std_error / scale
    assert est.method is IntegralMethod.MONTE_CARLO


def test_box_mc_deterministic_and_validated():
    a = integrate_box_mc(Parameters(3, 4), None, None, 0.5, 5000, seed=3)
    b = integrate_box_mc(Parameters(3, 4), None, None, 0.5, 5000, seed=3)
    assert a.value == b.value
    with pytest.raises(InvalidRadius):
        integrate_box_mc(Parameters(3, 4), None, None, 4.0, 5000, seed=0)
    with pytest.raises(InvalidParameter):
        integrate_box_mc(Parameters(3, 4), None, None, 0.5, 10, seed=0)


@pytest.mark.parametrize("n,t,delta", [(3, 8, 0.6), (4, 16, 0.4), (3, 16, 0.3)])
def test_residual_bound(n, t, delta):
    rep = residual_bound_check(Parameters(n, t), None, delta, samples=200000, seed=1)
    assert rep.holds, rep


def test_residual_errors():
    with pytest.raises(InvalidDelta):
        residual_integral_mc(Parameters(3, 8), None, 0.0, 1000, 0)
    with pytest.raises(InvalidDelta):
        residual_bound_check(Parameters(3, 8), None, 1.0, 1000, 0)


def test_residual_record():
    rec = residual_integral_mc(Parameters(3, 8), None, 0.5, 2000, 0).to_record()
    assert set(rec) >= {"method", "n", "t", "delta", "value", "std_error", "nodes_or_samples", "seed"}


@pytest.mark.parametrize("n", [3, 4, 5])
def test_full_boxes_are_half_bounded(n):
    assert odd_box_magnitude_max(n, 50000, seed=n) <= 0.5 + 1e-12
    assert magnitude_envelope_ok(n, 5000, seed=n)


def test_gaussian_box_sandwich():
    for d, t, delta in [(3, 8, 0.3), (6, 16, 0.2), (1, 1, 2.0)]:
        box = gaussian_box_integral(d, t, delta)
        assert box.inside
        one_d = math.sqrt(2 * math.pi / t) * math.erf(delta * math.sqrt(t / 2))
        assert box.value == pytest.approx(one_d ** d)
    with pytest.raises(InvalidParameter):
        gaussian_box_integral(3, 0, 0.1)
