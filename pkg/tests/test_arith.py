import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hypid.arith import (IpdSpec, falling, gamma_cx, gamma_ratio, lgamma_cx, pochhammer,
                         pochhammer_ipd, pochhammer_vec, sigma_coeffs, stirling2)
from hypid.errors import PoleError

# mpmath at 30 digits, frozen
GAMMA_ORACLE = [
    (0.5, 1.772453850905516 + 0j),
    (3.7, 4.170651783796604 + 0j),
    (-2.5, -0.9453087204829419 + 0j),
    (0.3 + 1.2j, 0.10707547496255364 - 0.3531439877290886j),
    (-1.7 - 0.4j, 1.1356438824316395 + 0.26890799072916943j),
    (12.25 + 3j, 21022542.285804983 + 45887353.107764624j),
]

cplx = st.complex_numbers(min_magnitude=0.0, max_magnitude=6.0, allow_nan=False,
                          allow_infinity=False)


def test_pochhammer_examples():
    assert pochhammer(0.3 + 2j, 0) == 1
    assert pochhammer(-3, 5) == 0
    assert abs(pochhammer(2.5, 3) - 39.375) < 1e-12


def test_pochhammer_vec_examples():
    assert pochhammer_vec((), 4) == 1
    assert pochhammer_vec((1, 2), 2) == 12
    assert pochhammer_vec((-1, 5), 3) == 0


def test_pochhammer_ipd_examples():
    assert pochhammer_ipd(IpdSpec((2,), (1,))) == 2
    assert pochhammer_ipd(IpdSpec((2, 3), (1, 2))) == 24
    assert pochhammer_ipd(IpdSpec((1,), (2,)), -1) == 0


def test_stirling_examples():
    assert all(stirling2(n, n) == 1 for n in range(10))
    assert stirling2(3, 0) == 0
    assert stirling2(3, 2) == 3
    # exact integers far beyond 64-bit range
    assert stirling2(60, 30) > 2 ** 64


def test_sigma_examples():
    assert np.allclose(sigma_coeffs(IpdSpec((2,), (1,))), [2, 1])
    assert np.allclose(sigma_coeffs(IpdSpec((1, 1), (1, 1))), [1, 2, 1])
    assert sigma_coeffs(IpdSpec((0.3, 1.7, 2.2), (2, 1, 3)))[-1] == 1


def test_gamma_examples():
    assert abs(gamma_cx(1) - 1) < 1e-14
    assert abs(gamma_cx(5) - 24) < 1e-12
    assert abs(gamma_cx(0.5) - math.sqrt(math.pi)) < 1e-14


@pytest.mark.parametrize("z, expected", GAMMA_ORACLE)
def test_gamma_against_mpmath(z, expected):
    assert abs(gamma_cx(z) - expected) <= 1e-13 * abs(expected)


@pytest.mark.parametrize("z", [0, -1, -7, -30.0 + 0j])
def test_gamma_pole_raises(z):
    with pytest.raises(PoleError):
        gamma_cx(z)


def test_gamma_ratio_large_arguments_do_not_overflow():
    # Gamma(200.5) / Gamma(200) ~ sqrt(200)
    assert abs(gamma_ratio([200.5], [200]) / math.sqrt(200) - 1) < 1e-2
    assert abs(gamma_ratio([200.5], [200]) - math.exp(math.lgamma(200.5) - math.lgamma(200))) < 1e-9


def test_lgamma_matches_stdlib_on_real_axis():
    for x in (0.1, 1.5, 7.25, 40.0):
        assert abs(lgamma_cx(x).real - math.lgamma(x)) < 1e-12


def test_large_n_pochhammer_uses_gamma_branch():
    a, n = 0.75 + 0.5j, 90
    direct = 1 + 0j
    for k in range(n):
        direct *= a + k
    assert abs(pochhammer(a, n) / direct - 1) < 1e-11
    assert pochhammer(-80, 90) == 0


@given(cplx, st.integers(0, 40))
def test_pochhammer_recurrence(a, n):
    lhs = pochhammer(a, n + 1)
    rhs = pochhammer(a, n) * (a + n)
    assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), abs(rhs), 1e-300)


@given(st.floats(0.1, 8.0), st.floats(-3.0, 3.0), st.integers(0, 12))
def test_pochhammer_gamma_ratio(re, im, n):
    a = complex(re, im)
    ref = gamma_cx(a + n) / gamma_cx(a)
    assert abs(pochhammer(a, n) - ref) <= 1e-10 * abs(ref)


@given(st.lists(st.floats(0.3, 4.0), min_size=1, max_size=3),
       st.lists(st.integers(1, 3), min_size=3, max_size=3),
       st.lists(st.complex_numbers(max_magnitude=3.0), min_size=20, max_size=20))
def test_sigma_round_trip(f, m, xs):
    spec = IpdSpec(tuple(f), tuple(m[:len(f)]))
    sig = sigma_coeffs(spec)
    for x in xs:
        poly = sum(s * x ** j for j, s in enumerate(sig))
        ref = pochhammer_ipd(spec, x)
        scale = sum(abs(s) * abs(x) ** j for j, s in enumerate(sig))
        assert abs(poly - ref) <= 1e-12 * scale


@pytest.mark.parametrize("x", range(1, 7))
def test_stirling_row_sum(x):
    for j in range(9):
        assert sum(stirling2(j, k) * falling(x, k) for k in range(j + 1)) == x ** j


def test_ipd_spec_validation():
    with pytest.raises(ValueError):
        IpdSpec((1.0,), (0,))
    with pytest.raises(ValueError):
        IpdSpec((-2.0,), (1,))
    with pytest.raises(ValueError):
        IpdSpec((1.0, 2.0), (1,))
    spec = IpdSpec((1.5, 0.5), (2, 1))
    assert spec.m_total == 3 and spec.r == 2 and spec.top == (3.5, 1.5)


def test_reflection_branch_is_consistent():
    z = -3.3 + 0.2j
    assert abs(cmath.exp(lgamma_cx(z)) - gamma_cx(z)) < 1e-13 * abs(gamma_cx(z))
