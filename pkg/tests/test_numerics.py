import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tunnelmeas.errors import ConvergenceFailure, DomainError
from tunnelmeas.numerics import adaptive_quadrature, endpoint_singular_quadrature, sin_sq_over_half, sinc_sq_half


@pytest.mark.parametrize(
    "f, a, b, exact",
    [
        (lambda x: x * x, 0.0, 1.0, 1.0 / 3.0),
        (lambda x: math.exp(-2 * x), 0.0, 1.0, (1 - math.exp(-2)) / 2),
        (math.sin, 0.0, math.pi, 2.0),
    ],
)
def test_adaptive_quadrature_analytic(f, a, b, exact):
    res = adaptive_quadrature(f, a, b, rel_tol=1e-12)
    assert abs(res.value - exact) <= 1e-12 * abs(exact)
    assert res.error_estimate <= 1e-12 * abs(res.value)
    assert res.evaluations >= 15


@given(st.lists(st.floats(-10, 10), min_size=6, max_size=6))
def test_quadrature_exact_on_quintics(c):
    f = lambda x: sum(ci * x ** i for i, ci in enumerate(c))
    exact = sum(ci / (i + 1) for i, ci in enumerate(c))
    scale = sum(abs(ci) for ci in c) + 1e-300
    assert abs(adaptive_quadrature(f, 0.0, 1.0).value - exact) <= 1e-13 * max(scale, 1.0)


def test_adaptive_quadrature_deterministic_and_complex():
    f = lambda x: complex(math.cos(3 * x), math.sin(3 * x))
    r1 = adaptive_quadrature(f, 0.0, 2.0)
    r2 = adaptive_quadrature(f, 0.0, 2.0)
    assert r1 == r2
    assert r1.value == pytest.approx(complex(math.sin(6) / 3, (1 - math.cos(6)) / 3), rel=1e-12)


def test_adaptive_quadrature_errors():
    with pytest.raises(DomainError):
        adaptive_quadrature(math.sin, 1.0, 0.0)
    with pytest.raises(ConvergenceFailure) as info:
        adaptive_quadrature(lambda x: 1.0 / x if x else 0.0, 0.0, 1.0, max_depth=8)
    assert info.value.partial is not None


def test_zero_valued_integral_converges():
    assert abs(adaptive_quadrature(math.sin, 0.0, 2 * math.pi).value) < 1e-14


def test_endpoint_singular_left():
    res = endpoint_singular_quadrature(lambda x: x ** -0.5, 0.0, 1.0, rel_tol=1e-12)
    assert abs(res.value - 2.0) <= 1e-10 * 2.0


def test_endpoint_singular_both_ends_with_complement():
    def f(x, xc):
        left = -xc if xc < 0 else x
        right = xc if xc > 0 else 1.0 - x
        return (left * right) ** -0.5

    res = endpoint_singular_quadrature(f, 0.0, 1.0, rel_tol=1e-12, complement=True)
    assert abs(res.value - math.pi) <= 1e-10 * math.pi


def test_endpoint_singular_plain_right_end_floor():
    # without the complement the right-end nodes lost to rounding cap accuracy
    res = endpoint_singular_quadrature(lambda x: (x * (1 - x)) ** -0.5, 0.0, 1.0, rel_tol=1e-9)
    assert abs(res.value - math.pi) <= 1e-7


@pytest.mark.parametrize("f", [lambda x: math.exp(-2 * x), lambda x: 1 / (1 + x * x), lambda x: math.cos(5 * x)])
def test_endpoint_singular_agrees_with_adaptive_on_smooth(f):
    a = adaptive_quadrature(f, 0.0, 2.0, rel_tol=1e-14).value
    b = endpoint_singular_quadrature(f, 0.0, 2.0, rel_tol=1e-14).value
    assert abs(a - b) <= 1e-12 * abs(a)


def test_sinc_values():
    assert sinc_sq_half(0.0, 3.0, 2) == 9.0
    assert sinc_sq_half(2.0, math.pi / 2, 1) == pytest.approx(1.0, rel=1e-15)
    with pytest.raises(DomainError):
        sinc_sq_half(1.0, -1.0, 1)
    with pytest.raises(DomainError):
        sinc_sq_half(1.0, 1.0, 3)


def test_sinc_series_branch_matches_direct():
    # wt = 1e-6 is on the series side; compare to the direct quotient
    w, t = 1e-6, 1.0
    direct = math.sin(0.5 * w * t) / (0.5 * w)
    assert abs(sinc_sq_half(w, t, 1) - direct) <= 1e-12 * direct
    assert abs(sinc_sq_half(w, t, 2) - direct ** 2) <= 1e-12 * direct ** 2


def test_sinc_branch_continuity_scan():
    t = 1.0
    worst = 0.0
    for wt in np.linspace(0.5e-4, 2e-4, 2001):
        series = t * (1 - wt ** 2 / 24 + wt ** 4 / 1920)
        direct = math.sin(0.5 * wt) / (0.5 * wt)
        worst = max(worst, abs(series - direct) / direct, abs(sinc_sq_half(wt, t, 1) - direct) / direct)
    assert worst <= 1e-11


@given(st.floats(-50, 50), st.floats(0, 50))
def test_sinc_even_in_omega(w, t):
    for power in (1, 2):
        a, b = sinc_sq_half(w, t, power), sinc_sq_half(-w, t, power)
        assert abs(a - b) <= 1e-14 * max(abs(a), 1e-300)


def test_sin_sq_over_half_limits():
    assert sin_sq_over_half(0.0, 5.0) == 0.0
    w, t = 0.7, 2.3
    assert sin_sq_over_half(w, t) == pytest.approx(math.sin(w * t / 2) ** 2 / (w / 2), rel=1e-14)
