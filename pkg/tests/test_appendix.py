import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hadawalk.appendix import (
    PowerBoundCase,
    Status,
    check_identity_part1,
    check_lower_parts,
    check_ratio_lemma,
    cpow,
    run_suite,
)
from hadawalk.errors import AlphaNotPositive, BadInput, DegenerateCase


def test_cpow_matches_builtin():
    z = 0.9 + 0.3j
    for k in range(0, 25):
        assert cpow(z, k) == pytest.approx(z ** k, rel=1e-13)
    arr = np.array([z, 1j])
    assert np.allclose(cpow(arr, 8), arr ** 8)


def test_identity_examples():
    assert check_identity_part1(PowerBoundCase(1 + 0j, 1))
    assert check_identity_part1(PowerBoundCase(cmath.exp(1j * math.pi / 16), 1))
    assert check_identity_part1(PowerBoundCase(2 + 0.1j, 2))


def test_identity_degenerate():
    with pytest.raises(DegenerateCase):
        check_identity_part1(PowerBoundCase(1j, 1))
    with pytest.raises(DegenerateCase):
        PowerBoundCase(1e60 + 0j, 1).zpow()
    with pytest.raises(BadInput):
        PowerBoundCase(1 + 0j, 0)


def test_lower_parts_examples():
    rep = check_lower_parts(PowerBoundCase(1 + 0.05j, 1))
    assert rep.alpha == pytest.approx(1 - 6 * 0.0025)
    assert rep.status is Status.PASS
    assert rep.re_positive and rep.ratio_ok and rep.lower_ok
    assert rep.lower <= rep.re_power <= rep.upper
    assert check_lower_parts(PowerBoundCase(3 + 0j, 4)).holds


def test_lower_parts_not_applicable():
    case = PowerBoundCase(1 + 0.5j, 2)
    assert check_lower_parts(case).status is Status.NOT_APPLICABLE
    with pytest.raises(AlphaNotPositive):
        check_lower_parts(case, strict=True)


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 5), st.floats(-2, 2), st.floats(-0.999, 0.999), st.booleans())
def test_lower_parts_property(t, logr, frac, negative):
    k = 4 * t
    beta = frac / math.sqrt(k * (k - 1) / 2)
    re = (-1 if negative else 1) * math.exp(logr) / math.sqrt(1 + beta ** 2)
    assert check_lower_parts(PowerBoundCase(complex(re, re * beta), t)).holds


def test_ratio_lemma_examples():
    assert check_ratio_lemma([1, 1], [1, 2], [1, 4])
    assert check_ratio_lemma([2, 3, 5], [1, 2, 3], [1, 2, 3])
    with pytest.raises(BadInput):
        check_ratio_lemma([1, 1], [0, 1], [1, 1])
    with pytest.raises(BadInput):
        check_ratio_lemma([1], [1, 2], [1, 2])


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.floats(1e-3, 1e3), st.floats(1e-3, 1e3), st.floats(0, 1e3)), min_size=1, max_size=20))
def test_ratio_lemma_property(rows):
    lam, a, b = zip(*rows)
    assert check_ratio_lemma(lam, a, b)


def test_randomized_suite():
    rep = run_suite(20000, seed=3, ratio_cases=2000)
    assert rep.holds, rep
