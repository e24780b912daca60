"""Bessel, Neumann and Hankel functions against frozen high-precision values."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mwmusic import kernels
from mwmusic.specfun import (SeriesBudget, bessel_j, bessel_j_table, bessel_tail_bound, bessel_y,
                             default_budget, hankel1_0, plane_wave_series)

# Reference values from mpmath at 30 digits.
J0_FIRST_ZERO = 2.404825557695773

J_REFERENCE = [
    (0, 0.5, 0.93846980724081290423),
    (1, 5.0, -0.32757913759146522204),
    (3, 7.25, -0.21924533340150819107),
    (10, 12.5, 0.27887174659353570044),
    (0, 30.0, -0.086367983581040211336),
    (25, 40.0, -0.026360341175918507035),
    (60, 40.0, 1.30926713829819886e-7),
    (5, 100.0, -0.074195736964513920834),
]

Y_REFERENCE = [
    (0, 0.5, -0.44451873350670655715),
    (1, 0.5, -1.4714723926702430692),
    (0, 5.0, -0.30851762524903378007),
    (1, 25.0, -0.098829964783237410053),
    (0, 40.0, 0.12593641705826092925),
    (1, 100.0, -0.020372312002759793305),
]

H_REFERENCE = [
    (0.3 + 0.01j, 0.95472701391032052091 - 0.80841515890697549318j),
    (11.9 + 0.9j, 0.0066479718038244895403 - 0.0935540694317741328j),
    (12.1 + 0.9j, 0.024966161256572549568 - 0.089606545289842809164j),
    (5.63935 + 0.42j, 0.018200873131528836689 - 0.2189474001731545893j),
    (40.0 + 3.0j, 0.00060002324140055414568 + 0.0062416917762859646821j),
]


@pytest.mark.parametrize("order,x,expected", J_REFERENCE)
def test_bessel_j_reference(order, x, expected):
    assert bessel_j(order, x) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("order,x,expected", Y_REFERENCE)
def test_bessel_y_reference(order, x, expected):
    assert bessel_y(order, x) == pytest.approx(expected, abs=1e-11)


@pytest.mark.parametrize("z,expected", H_REFERENCE)
def test_hankel_reference(z, expected):
    assert abs(hankel1_0(z) - expected) <= 1e-9 * abs(expected)


def test_j_at_origin():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(1, 0.0) == 0.0
    assert np.all(bessel_j_table(20, np.zeros(3))[:, 1:] == 0.0)


def test_j0_first_zero():
    assert abs(bessel_j(0, J0_FIRST_ZERO)) < 1e-9


@pytest.mark.parametrize("x", [0.5, 5.0, 25.0])
def test_wronskian(x):
    w = bessel_j(1, x) * bessel_y(0, x) - bessel_j(0, x) * bessel_y(1, x)
    assert w == pytest.approx(2.0 / (math.pi * x), abs=1e-9)


def test_y0_small_argument_log_form():
    gamma = 0.5772156649015329
    for x in (1e-4, 1e-5, 1e-6):
        approx = (2.0 / math.pi) * (math.log(x / 2.0) + gamma)
        assert abs(bessel_y(0, x) - approx) < 10 * x


def test_y0_first_zero_bracket():
    assert np.sign(bessel_y(0, 0.8)) != np.sign(bessel_y(0, 1.0))


def test_domain_errors():
    with pytest.raises(ValueError):
        bessel_j(0, -1.0)
    with pytest.raises(ValueError):
        bessel_y(0, 0.0)
    with pytest.raises(ValueError):
        bessel_y(2, 1.0)
    with pytest.raises(ValueError):
        hankel1_0(0j)
    with pytest.raises(ValueError):
        SeriesBudget(0)
    with pytest.raises(ValueError):
        SeriesBudget(5, tol=0.0)


@pytest.mark.parametrize("x", [0.7, 3.0, 11.5, 12.5, 30.0, 49.0])
def test_hankel_matches_real_parts(x):
    h = hankel1_0(complex(x))
    assert abs(h - complex(bessel_j(0, x), bessel_y(0, x))) <= 1e-9


def test_hankel_large_argument_form():
    x = 40.0
    approx = math.sqrt(2.0 / (math.pi * x)) * np.exp(1j * (x - math.pi / 4))
    assert abs(hankel1_0(x) - approx) / abs(approx) <= 0.01


def test_hankel_conjugation_at_three():
    # J0 and Y0 have real Taylor coefficients, so J0(conj z) = conj J0(z);
    # with H = J0 + i Y0 this gives conj(H(conj z)) = J0(z) - i Y0(z) = 2 J0(z) - H(z).
    z = 3.0 + 0.1j
    h = hankel1_0(z)
    h_conj = hankel1_0(np.conj(z))
    j0 = 0.5 * (h + np.conj(h_conj))
    # J0(3 + 0.1 i) from mpmath.
    assert abs(j0 - (-0.26191866358966409 - 0.033935410445660567j)) < 1e-9


def test_reflection_identity():
    x = np.linspace(0.0, 40.0, 41)
    for n in range(0, 31):
        sign = -1.0 if n % 2 else 1.0
        np.testing.assert_array_equal(bessel_j(-n, x), sign * bessel_j(n, x))


def test_recurrence_residual():
    x = np.linspace(0.5, 40.0, 80)
    table = bessel_j_table(31, x)
    for nu in range(1, 31):
        resid = table[:, nu - 1] + table[:, nu + 1] - (2 * nu / x) * table[:, nu]
        assert np.max(np.abs(resid)) <= 1e-9


def test_parseval_at_default_budget():
    for x in np.linspace(0.0, 30.0, 31):
        b = default_budget(x)
        t = bessel_j_table(b.nu_max, np.array([x]))[0]
        total = t[0] ** 2 + 2.0 * np.sum(t[1:] ** 2)
        assert total <= 1.0 + 1e-12
        assert abs(total - 1.0) <= 1e-10


def test_plane_wave_examples():
    assert abs(plane_wave_series(0.0, 1.234).value - 1.0) <= 1e-15
    assert abs(plane_wave_series(5.0, math.pi / 3).value - np.exp(2.5j)) <= 1e-10


def test_plane_wave_lattice():
    xs = np.linspace(0.0, 30.0, 10)
    thetas = np.linspace(-math.pi, math.pi, 10)
    for x in xs:
        for th in thetas:
            res = plane_wave_series(x, th)
            assert abs(res.value - np.exp(1j * x * math.cos(th))) <= 1e-10
            assert res.residual_bound <= 1e-10


def test_plane_wave_reports_saturation():
    res = plane_wave_series(30.0, 0.4, SeriesBudget(10))
    assert res.nu_max == 10
    assert res.residual_bound > 1e-10


def test_antipodal_odd_terms_cancel():
    x = 4.2
    t = bessel_j_table(15, np.array([x]))[0]
    for nu in range(1, 16, 2):
        theta = 0.77
        pair = (1j ** nu) * t[nu] * (np.exp(1j * nu * theta) + np.exp(1j * nu * (theta + math.pi)))
        assert abs(pair) <= 1e-15


def test_tail_bound_dominates_dropped_terms():
    x = np.array([1.0, 10.0, 25.0])
    full = bessel_j_table(120, x)
    for nu_max in (20, 40, 60):
        actual = np.abs(full[:, nu_max + 1:]).sum(axis=1)
        assert np.all(actual <= bessel_tail_bound(x, nu_max) + 1e-300)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.0, 30.0), st.floats(-math.pi, math.pi))
def test_plane_wave_property(x, theta):
    assert abs(plane_wave_series(x, theta).value - np.exp(1j * x * math.cos(theta))) <= 1e-10


@settings(max_examples=60, deadline=None)
@given(st.floats(1e-4, 50.0), st.floats(-0.2, 0.2))
def test_hankel_against_scipy(re, slope):
    from scipy.special import hankel1
    z = complex(re, slope * re)
    ref = hankel1(0, z)
    assert abs(hankel1_0(z) - ref) <= 1e-8 * abs(ref)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 60), st.floats(0.0, 50.0))
def test_j_against_scipy(order, x):
    from scipy.special import jv
    assert abs(bessel_j(order, x) - jv(order, x)) <= 1e-10


@pytest.mark.parametrize("name", ["numpy", "numba"])
def test_backends_agree(name):
    be = kernels.get_backend(name)
    ref = kernels.get_backend("numpy")
    x = np.linspace(0.0, 45.0, 97)
    np.testing.assert_allclose(be.bessel_j_table(50, x), ref.bessel_j_table(50, x), rtol=0, atol=1e-12)
    xp = x[1:]
    for a, b in zip(be.bessel_y01(xp), ref.bessel_y01(xp)):
        np.testing.assert_allclose(a, b, rtol=0, atol=1e-12)
    z = xp * (1 + 0.07j)
    np.testing.assert_allclose(be.hankel1_0(z), ref.hankel1_0(z), rtol=1e-11)


def test_unknown_backend_rejected():
    with pytest.raises((ImportError, ValueError)):
        kernels.get_backend("fortran")


@pytest.mark.parametrize("value,expected", [("numpy", "numpy"), ("numba", "numba")])
def test_backend_env_flag(value, expected):
    import os
    import subprocess
    import sys
    env = dict(os.environ, MWMUSIC_BACKEND=value)
    code = "from mwmusic import kernels; print(kernels.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == expected


def test_backend_env_flag_rejects_unknown():
    import os
    import subprocess
    import sys
    env = dict(os.environ, MWMUSIC_BACKEND="cuda")
    out = subprocess.run([sys.executable, "-c", "import mwmusic"], env=env, capture_output=True, text=True)
    assert out.returncode != 0 and "MWMUSIC_BACKEND" in out.stderr
