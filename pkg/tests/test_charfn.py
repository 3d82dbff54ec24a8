import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hadawalk.charfn import (
    cubic_term,
    eps_bounds,
    psi,
    psi_magnitude_bound,
    psi_magnitude_bound_min,
    psi_many,
    psi_power_real_bounds,
)
from hadawalk.core import Parameters, pair_count
from hadawalk.errors import BadRowIndex, InvalidDelta, InvalidParameter, OutOfRegion
from hadawalk.unitset import iter_lambda


def _rng(seed=0):
    return np.random.default_rng(seed)


def test_psi_at_origin():
    assert psi(Parameters(4), np.zeros(6)) == 1


def test_psi_n2_is_cosine():
    lam = np.array([0.7])
    assert psi(2, lam) == pytest.approx(math.cos(0.7))


@pytest.mark.parametrize("n", [3, 4, 5])
def test_psi_conjugate_symmetry_and_modulus(n):
    pts = _rng(n).uniform(-math.pi, math.pi, size=(500, pair_count(n)))
    a = psi_many(n, pts)
    b = psi_many(n, -pts)
    assert np.allclose(a, np.conj(b))
    assert np.all(np.abs(a) <= 1 + 1e-12)


def test_psi_many_matches_scalar():
    pts = _rng(1).uniform(-3, 3, size=(20, 6))
    vec = psi_many(4, pts)
    for p, v in zip(pts, vec):
        assert psi(4, p) == pytest.approx(v, abs=1e-14)


def test_psi_rejects_batches():
    with pytest.raises(InvalidParameter):
        psi(3, np.zeros((2, 3)))


@pytest.mark.parametrize("n", [3, 4])
def test_unit_set_points_have_modulus_one(n):
    for k, p in enumerate(iter_lambda(n)):
        assert abs(psi(n, p.values())) == pytest.approx(1.0, abs=1e-12)
        if k > 300:
            break


def test_cubic_term_controls_imaginary_part():
    lam = np.full(3, 0.01)
    assert psi(3, lam).imag == pytest.approx(-cubic_term(3, lam), rel=1e-3)
    assert cubic_term(2, np.array([0.3])) == 0.0


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_local_estimates_hold_in_box(n):
    delta = 0.6 / n
    d = pair_count(n)
    rng = _rng(n)
    pts = rng.uniform(-delta, delta, size=(300, d))
    corners = delta * np.where(rng.random((100, d)) < 0.5, -1.0, 1.0)
    for lam in np.vstack([pts, corners]):
        rep = psi_power_real_bounds(n, lam, delta)
        assert rep.holds, rep


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 6), st.floats(0.01, 0.99), st.integers(0, 2 ** 32 - 1))
def test_local_estimates_property(n, frac, seed):
    delta = frac / n
    lam = _rng(seed).uniform(-delta, delta, size=pair_count(n))
    assert psi_power_real_bounds(n, lam, delta).holds


def test_eps_bounds_values():
    b1, b2 = eps_bounds(3, 0.1)
    assert b2 == pytest.approx(0.3 ** 4 / 12)
    assert b1 == pytest.approx(b2 * math.exp(0.045))


def test_local_estimate_errors():
    with pytest.raises(InvalidDelta):
        psi_power_real_bounds(3, np.zeros(3), 0.0)
    with pytest.raises(InvalidDelta):
        psi_power_real_bounds(3, np.zeros(3), 1.0)
    with pytest.raises(InvalidParameter):
        psi_power_real_bounds(2, np.zeros(1), 0.1)
    with pytest.raises(OutOfRegion):
        psi_power_real_bounds(3, np.array([0.2, 0, 0]), 0.1)


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_magnitude_bound_everywhere(n):
    pts = _rng(n + 10).uniform(-math.pi, math.pi, size=(2000, pair_count(n)))
    mag2 = np.abs(psi_many(n, pts)) ** 2
    for k in range(1, n + 1):
        assert np.all(mag2 <= psi_magnitude_bound(n, pts, k) + 1e-12)
    assert np.all(mag2 <= psi_magnitude_bound_min(n, pts) + 1e-12)


def test_magnitude_bound_row_index():
    with pytest.raises(BadRowIndex):
        psi_magnitude_bound(3, np.zeros(3), 0)
    with pytest.raises(BadRowIndex):
        psi_magnitude_bound(3, np.zeros(3), 4)
    assert psi_magnitude_bound(3, np.zeros(3), 1) == 1.0
