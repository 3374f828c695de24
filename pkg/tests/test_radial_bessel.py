import math

import numpy as np
import pytest
import scipy.special as sp
from hypothesis import given, settings, strategies as st

from h2scatter.bessel import riccati_pair, spherical_bessel, spherical_bessel_table, spherical_neumann_table
from h2scatter.radial import RadialGrid, integrate, simpson_weights


def test_j0_at_zero_and_higher_orders_vanish():
    assert spherical_bessel(0, 0.0) == 1.0
    for L in range(1, 6):
        assert spherical_bessel(L, 0.0) == 0.0


def test_j1_closed_form():
    assert spherical_bessel(1, 1.0) == pytest.approx(math.sin(1) - math.cos(1), abs=1e-15)
    assert spherical_bessel(1, 1.0) == pytest.approx(0.30117, abs=1e-5)


def test_against_scipy_all_regimes():
    x = np.concatenate([np.geomspace(1e-6, 1e-3, 20), np.linspace(1e-3, 30, 600), np.linspace(30, 150, 300)])
    table = spherical_bessel_table(25, x)
    for L in range(26):
        ref = sp.spherical_jn(L, x)
        assert np.max(np.abs(table[L] - ref)) < 1e-13


def test_neumann_against_scipy():
    x = np.linspace(0.5, 60, 400)
    table = spherical_neumann_table(12, x)
    for L in range(13):
        ref = sp.spherical_yn(L, x)
        assert np.allclose(table[L], ref, rtol=1e-10, atol=1e-14)


@settings(max_examples=50, deadline=None)
@given(L=st.integers(1, 12), x=st.floats(1e-3, 80.0))
def test_three_term_recurrence(L, x):
    j = spherical_bessel_table(L + 1, np.array([x]))[:, 0]
    lhs = j[L - 1] + j[L + 1]
    rhs = (2 * L + 1) / x * j[L]
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs), abs(lhs))


def test_riccati_wronskian():
    x = np.linspace(1.0, 50.0, 200)
    for L in (0, 1, 3, 7):
        h = 1e-5
        s0, c0 = riccati_pair(L, x)
        sp_, cp = riccati_pair(L, x + h)
        sm, cm = riccati_pair(L, x - h)
        w = s0 * (cp - cm) / (2 * h) - c0 * (sp_ - sm) / (2 * h)
        assert np.allclose(w, -1.0, atol=1e-6)


def test_simpson_exact_for_cubics():
    for n in (3, 4, 7, 10, 101):
        x = np.linspace(0.0, 2.0, n)
        w = simpson_weights(n, x[1] - x[0])
        assert w @ (x**3 - x + 1) == pytest.approx(4.0 - 2.0 + 2.0, rel=1e-13)


def test_integrate_gaussian():
    g = RadialGrid(0.0, 20.0, 0.01)
    val = integrate(np.exp(-((g.r - 10) ** 2)), g.dr)
    assert val == pytest.approx(math.sqrt(math.pi), rel=1e-10)


def test_grid_validation():
    with pytest.raises(ValueError):
        RadialGrid(1.0, 1.0, 0.1)
    assert RadialGrid().halved().n == 2 * RadialGrid().n - 1
