"""Univariate root finding: closed forms, companion matrix, filtering."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from chainplan.roots import ZeroPolynomialError, real_nonneg_roots, roots_all


def test_constant_and_zero():
    assert roots_all([3.0]) == []
    with pytest.raises(ZeroPolynomialError):
        roots_all([0.0, 0.0])
    with pytest.raises(ValueError):
        roots_all([])


def test_linear_and_quadratic_exact():
    assert roots_all([2.0, -6.0]) == [3.0]
    r = sorted(x.real for x in roots_all([1.0, -5.0, 6.0]))
    assert r == pytest.approx([2.0, 3.0], abs=1e-14)


def test_quadratic_cancellation_resistant():
    # x^2 - 1e8 x + 1 has roots ~1e8 and ~1e-8; the naive formula loses the
    # small one to cancellation
    r = sorted(x.real for x in roots_all([1.0, -1e8, 1.0]))
    assert r[0] == pytest.approx(1e-8, rel=1e-12)
    assert r[1] == pytest.approx(1e8, rel=1e-12)


def test_leading_deflation():
    # a numerically dead leading coefficient must not produce a huge root
    r = real_nonneg_roots([1e-16, 1.0, -2.0])
    assert r == pytest.approx([2.0], abs=1e-12)


def test_real_nonneg_filter():
    # (x + 1)(x - 1)(x^2 + 1): only x = 1 is real and nonnegative
    assert real_nonneg_roots([1.0, 0.0, 0.0, 0.0, -1.0]) == pytest.approx([1.0])


def test_near_zero_negative_clamps():
    r = real_nonneg_roots([1.0, 1e-12])  # root at -1e-12
    assert r == [0.0]


def test_quartic_against_numpy():
    rng = np.random.default_rng(5)
    for _ in range(300):
        true = np.sort(rng.uniform(-3.0, 3.0, size=4))
        c = np.poly(true)
        got = sorted(x.real for x in roots_all(c))
        assert np.allclose(got, true, atol=1e-7)


@given(roots=st.lists(st.floats(-5, 5), min_size=1, max_size=5),
       lead=st.floats(0.5, 2.0))
def test_reconstructed_polynomials_recover_roots(roots, lead):
    c = lead * np.poly(sorted(roots))
    got = sorted(x.real for x in roots_all(c))
    # clustered roots lose accuracy; compare as multisets with a loose match
    assert len(got) == len(roots)
    for want in sorted(roots):
        assert min(abs(g - want) for g in got) < 1e-3 * (1.0 + abs(want))


def test_polish_improves_high_degree():
    true = np.array([0.1, 0.5, 1.0, 2.0, 4.0, 8.0])
    c = np.poly(true)
    got = np.sort([x.real for x in roots_all(c)])
    assert np.allclose(got, true, rtol=1e-9)
