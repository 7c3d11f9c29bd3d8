"""Unit-argument identities: generalized Karlsson summation, beta-integral
transformations, a reduction lemma for ``F(a, 1; b, r | 1)`` and the
closed-form summations built from them.
"""
from __future__ import annotations

import cmath
import math
from typing import Optional, Sequence

from scipy.special import roots_jacobi

from .arith import (IpdSpec, gamma_ratio, pochhammer, pochhammer_ipd, pochhammer_vec, prod)
from .charpoly import (qhat0_value, q0_value, r_at, r_poly, rhat_at, rhat_poly, roots)
from .errors import ConstraintViolation, PoleError
from .hyp import EvalReport, HypSpec, eval_series, eval_unit
from .transforms import (Combo, Residual, _check_q, _forbid, _forbid_nonpos, check_thm1,
                         check_thm3, cor2_weight_a, make_residual, scaled, thm1_rhs)

UNIT_IDS = ("THM4", "THM5", "THM6", "COR7a", "COR7b", "RED_LEMMA", "EX2", "EX3_SUM", "EX4")

#: Minimum real part of a parametric excess accepted for slowly convergent series.
MIN_EXCESS = 0.4


def _exact(value: complex) -> EvalReport:
    return EvalReport(complex(value), 0, 0.0, True, abs(value))


def _safe_gamma_ratio(num: Sequence[complex], den: Sequence[complex]) -> complex:
    """Gamma ratio that is zero when a denominator gamma has a pole."""
    try:
        return gamma_ratio(num, den)
    except PoleError:
        for z in num:
            gamma_ratio([z], [])  # re-raise for numerator poles
        return 0j


def _ipd_unit(top: Sequence[complex], bottom: Sequence[complex], spec: IpdSpec) -> EvalReport:
    return eval_unit(HypSpec(tuple(top) + spec.top, tuple(bottom) + spec.f))


def karlsson_general(a, b, spec: IpdSpec, q: int) -> Residual:
    """``F(a, b, f+m; b+m-q, f | 1)`` against its gamma-ratio closed form.

    Requires ``Re(a + q) < 0``.  No ``f_j - b`` exclusion applies here: where
    the first degenerate transformation excludes it, ``R`` vanishes
    identically and so does the sum.
    """
    _check_q(q, spec)
    _forbid_nonpos(b + spec.m_total - q, "b + m - q")
    if complex(a + q).real >= 0:
        raise ConstraintViolation("Re(a + q) must be negative")
    m = spec.m_total
    lhs = _ipd_unit((a, b), (b + m - q,), spec)
    R = r_poly(b, spec, q)
    flags = ["zero_reduced_polynomial"] if R.is_zero else []
    rhs = (_safe_gamma_ratio([b + m - q, 1 - a], [b - a + m - q]) * R(a)
           / math.factorial(m - q - 1))
    return make_residual("THM4", lhs, _exact(rhs), flags)


def thomae_like_1(n: int, b, d, e, spec: IpdSpec, q: int) -> Residual:
    """Terminating transformation of ``F(-n, b, d, f+m; b+m-q, e, f | 1)``.

    The tail carries the factor ``(d)_{q+1}`` produced by the beta integral
    of ``y^{q+1}``; it is absent when ``n <= q``.
    """
    check_thm1(b, spec, q)
    if not isinstance(n, int) or n < 1:
        raise ConstraintViolation("n must be a positive integer")
    m = spec.m_total
    c = b + m - q
    lhs = _ipd_unit((-n, b, d), (c, e), spec)
    acc = Combo()
    first = sum((pochhammer(-n, j) * pochhammer(-q, j) * pochhammer(d, j) * q0_value(b, spec, q, j)
                 / (pochhammer(c, j) * pochhammer(1 + d - e - n, j) * math.factorial(j))
                 for j in range(q + 1)), 0j)
    acc.add(pochhammer(e - d, n) / pochhammer(e, n) * first)
    flags = []
    R = r_poly(b, spec, q)
    if R.is_zero:
        flags.append("zero_reduced_polynomial")
    elif n > q:
        lam = roots(R).roots
        coef = (pochhammer(d, q + 1) * (-1) ** (q + 1) * pochhammer(-n, q + 1) / pochhammer(c, q + 1)
                * pochhammer(e - d, n - q - 1) * r_at(b, spec, q)
                / (pochhammer(e, n) * math.factorial(m - q - 1)))
        tail = eval_unit(HypSpec((-n + q + 1, 1, d + q + 1) + tuple(z + q + 2 for z in lam),
                                 (b + m + 1, 2 + d + q - e - n) + tuple(z + q + 1 for z in lam)))
        acc.add_series(coef, tail)
    return make_residual("THM5", lhs, acc.report(), flags)


def _thm6_check(a, b, d, e, spec, q) -> None:
    check_thm3(a, b, spec, q)
    if complex(e - b - d - q).real <= 0 or complex(e - d).real <= 0:
        raise ConstraintViolation("need Re(e-b-d-q) > 0 and Re(e-d) > 0")


def thomae_like_2(a, b, d, e, spec: IpdSpec, q: int) -> Residual:
    """Non-terminating transformation of ``F(a, b, d, f+m; a+m-q, e, f | 1)``."""
    _thm6_check(a, b, d, e, spec, q)
    m = spec.m_total
    c = a + m - q
    lhs = _ipd_unit((a, b, d), (c, e), spec)
    pre = _safe_gamma_ratio([e, e - b - d - q], [e - d, e - b - q])
    first = sum((pochhammer(-q, j) * pochhammer(a - b - q, j) * pochhammer(d, j)
                 * qhat0_value(a, b, spec, q, j)
                 / (pochhammer(c, j) * pochhammer(e - b - q, j) * math.factorial(j))
                 for j in range(q + 1)), 0j)
    acc = Combo().add(pre * first)
    flags = []
    R = rhat_poly(a, b, spec, q)
    if R.is_zero:
        flags.append("zero_reduced_polynomial")
    else:
        gam = roots(R).roots
        coef = (_safe_gamma_ratio([e, e - b - d - q], [e - d, e - b + 1])
                * pochhammer(b - a, q + 1) * pochhammer(d, q + 1) * rhat_at(a, b, spec, q)
                / pochhammer(c, q + 1))
        tail = eval_unit(HypSpec((1, a - b + 1, d + q + 1) + tuple(z + q + 2 for z in gam),
                                 (a + m + 1, e - b + 1) + tuple(z + q + 1 for z in gam)))
        acc.add_series(coef, tail)
    return make_residual("THM6", lhs, acc.report(), flags)


def cor_q0_unit(variant: str, b, d, e, spec: IpdSpec, n: Optional[int] = None,
                a=None) -> Residual:
    """``q = 0`` forms of the two beta-integral transformations.

    ``first`` (terminating, needs ``n``)::

        (e)_n/(e-d)_n F(-n,b,d,f+m; b+m,e,f) = w + (1-w) F(-n,1,d,lam+1; b+m,1-e+d-n,lam)

    with ``w = (b)_m/(f)_m``.  ``second``::

        G F(a,b,d,f+m; a+m,e,f) = 1 + b d/(e-b) (a(f+m)/((a+m)f) - 1)
                                      * F(1,a-b+1,d+1,gam+2; a+m+1,e-b+1,gam+1)

    with ``G = Gamma(e-d)Gamma(e-b)/(Gamma(e)Gamma(e-b-d))``.  ``second_alt``
    is the form with the constant ``A``.
    """
    m = spec.m_total
    if variant == "first":
        _forbid_nonpos(b + m, "b + m")
        if m == 1 and spec.r == 1:
            _forbid(spec.f[0] - b, [0], "f - b")
        if not isinstance(n, int) or n < 1:
            raise ConstraintViolation("n must be a positive integer")
        lhs = scaled(_ipd_unit((-n, b, d), (b + m, e), spec), pochhammer(e, n) / pochhammer(e - d, n))
        w = pochhammer(b, m) / pochhammer_ipd(spec)
        R = r_poly(b, spec, 0)
        lam = [] if R.is_zero else roots(R).roots
        acc = Combo().add(w)
        acc.add_series(1 - w, eval_unit(HypSpec((-n, 1, d) + tuple(z + 1 for z in lam),
                                                (b + m, 1 - e + d - n) + tuple(lam))))
        return make_residual("COR7a", lhs, acc.report())
    if variant not in ("second", "second_alt"):
        raise ValueError(f"unknown variant {variant!r}")
    _forbid_nonpos(a + m, "a + m")
    _forbid(a - b, range(1 - m, 1), "a - b")
    if m == 1 and spec.r == 1:
        _forbid(spec.f[0] - a, [0], "f - a")
    if complex(e - b - d).real <= 0 or complex(e - d).real <= 0:
        raise ConstraintViolation("need Re(e-b-d) > 0 and Re(e-d) > 0")
    R = rhat_poly(a, b, spec, 0)
    gam = [] if R.is_zero else roots(R).roots
    F = _ipd_unit((a, b, d), (a + m, e), spec)
    if variant == "second":
        lhs = scaled(F, _safe_gamma_ratio([e - d, e - b], [e, e - b - d]))
        coef = b * d / (e - b) * (a * prod(spec.top) / ((a + m) * prod(spec.f)) - 1)
        acc = Combo().add(1.0)
        acc.add_series(coef, eval_unit(HypSpec((1, a - b + 1, d + 1) + tuple(z + 2 for z in gam),
                                               (a + m + 1, e - b + 1) + tuple(z + 1 for z in gam))))
        return make_residual("COR7b", lhs, acc.report())
    A = cor2_weight_a(a, b, spec)
    acc = Combo().add(A)
    acc.add_series(1 - A, eval_unit(HypSpec((d, a - b, 1) + tuple(z + 1 for z in gam),
                                            (a + m, e - b) + tuple(gam))))
    pre = _safe_gamma_ratio([e, e - b - d], [e - d, e - b])
    return make_residual("COR7b", F, acc.scaled(pre), extras={"A": A})


def pfq_unit_reduction(top: Sequence[complex], bottom: Sequence[complex], r_int: int) -> Residual:
    """Reduction of ``F(top, 1; bottom, r | 1)`` to ``F(top-r+1; bottom-r+1 | 1)``."""
    if not isinstance(r_int, int) or r_int < 1:
        raise ConstraintViolation("r must be a positive integer")
    top, bottom = tuple(complex(t) for t in top), tuple(complex(t) for t in bottom)
    r = r_int
    p, q = len(top), len(bottom)
    lhs = eval_unit(HypSpec(top + (1,), bottom + (r,)))
    den = pochhammer_vec([1 - t for t in top], r - 1)
    if den == 0:
        raise ConstraintViolation("(1 - a)_{r-1} vanishes")
    top_s = tuple(t - r + 1 for t in top)
    bot_s = tuple(t - r + 1 for t in bottom)
    for t in bot_s:
        _forbid_nonpos(t, "b - r + 1")
    pre = (pochhammer_vec([1 - t for t in bottom], r - 1) * math.factorial(r - 1)
           / (den * (-1) ** ((r - 1) * (p - q))))
    partial = sum((pochhammer_vec(top_s, j) / (pochhammer_vec(bot_s, j) * math.factorial(j))
                   for j in range(r - 1)), 0j)
    acc = Combo()
    acc.add_series(pre, eval_unit(HypSpec(top_s, bot_s)))
    acc.add(-pre * partial)
    return make_residual("RED_LEMMA", lhs, acc.report())


def example2_chain(a, b, d, f, e=None, r: Optional[int] = None) -> Residual:
    """``F(a, b, d, f+1; a+1, e, f | 1)`` in closed form.

    With ``e`` the general form (a 3F2 remains); with ``r`` (so ``e = b + r``)
    the fully summed form.
    """
    if (e is None) == (r is None):
        raise ValueError("give exactly one of e and r")
    if r is not None:
        e = b + r
    _forbid(a - b, [0], "a - b")
    _forbid(f, [0], "f")
    if complex(e - b - d).real <= 0:
        raise ConstraintViolation("need Re(e-b-d) > 0")
    lhs = eval_unit(HypSpec((a, b, d, f + 1), (a + 1, e, f)))
    k = b * (a - f) / ((a - b) * f)
    if r is None:
        inner = eval_unit(HypSpec((d, a - b, 1), (a + 1, e - b)))
        pre = _safe_gamma_ratio([e, e - b - d], [e - d, e - b])
        acc = Combo().add(1 - k)
        acc.add_series(k, inner)
        return make_residual("EX2", lhs, acc.scaled(pre))
    brace = (_safe_gamma_ratio([a - r + 2, b - d + r], [1 - d + a, 1 + b])
             - sum((pochhammer(d - r + 1, j) * pochhammer(a - b - r + 1, j)
                    / (pochhammer(a - r + 2, j) * math.factorial(j)) for j in range(r - 1)), 0j))
    inner = ((-1) ** (r - 1) * pochhammer(-a, r - 1) * math.factorial(r - 1)
             / (pochhammer(1 - d, r - 1) * pochhammer(1 - a + b, r - 1)) * brace)
    pre = _safe_gamma_ratio([b + r, r - d], [b - d + r, r])
    return make_residual("EX2", lhs, _exact(pre * (1 - k * (1 - inner))), extras={"r": r})


def beta_method_thm5(n: int, b, d, e, spec: IpdSpec, q: int, nodes: int = 64) -> Residual:
    """Cross-derivation of the terminating transformation by quadrature.

    Integrates ``(1-x)^n`` times the right-hand side of the degenerate first
    transformation (``a = -n``) against the Jacobi weight
    ``x^(d-1) (1-x)^(e-d-1)`` and divides by ``B(d, e-d)``; the result must
    equal ``F(-n, b, d, f+m; b+m-q, e, f | 1)``.  Needs real ``d > 0`` and
    ``e - d > 0``.
    """
    check_thm1(b, spec, q)
    d, e = complex(d), complex(e)
    if d.imag or e.imag or d.real <= 0 or (e - d).real <= 0:
        raise ConstraintViolation("quadrature needs real d > 0 and e - d > 0")
    m = spec.m_total
    lhs = _ipd_unit((-n, b, d), (b + m - q, e), spec)
    u, w = roots_jacobi(nodes, (e - d).real - 1.0, d.real - 1.0)
    xs = (1.0 + u) / 2.0
    total = 0j
    converged = True
    for xi, wi in zip(xs, w):
        rep, _, _ = thm1_rhs(-n, b, spec, q, complex(xi))
        converged = converged and rep.converged
        total += float(wi) * (1.0 - float(xi)) ** n * rep.value
    # map [-1, 1] to [0, 1]: factor 2^-(e-1); divide by B(d, e-d)
    value = total * 2.0 ** (-(e.real - 1.0)) * _safe_gamma_ratio([e], [d, e - d])
    rhs = EvalReport(value, nodes, 0.0, converged, abs(value))
    return make_residual("THM5", lhs, rhs, extras={"nodes": nodes})


# --- worked cases with closed-form constants ---------------------------------------

def example3_constant_a(a, b, f) -> complex:
    """Constant ``A`` for ``r = 1``, ``m = 2``."""
    return sum((math.comb(2, k) * (-1) ** k * pochhammer(a, k) * pochhammer(b, k)
                * pochhammer(-1 - a, 2 - k)
                / (pochhammer(f, k) * pochhammer(a - b, k) * pochhammer(b - a - 1, 2 - k))
                for k in range(3)), 0j)


def example3_root(a, b, f) -> complex:
    """Root of ``R^_1`` for ``r = 1``, ``m = 2``."""
    s = (1 + a - b) * (1 + f)
    return (s + a * (f - b)) / (s - a * (f - b))


def example3_sum(a, b, d, f, r: int, closed: bool = True) -> Residual:
    """``F(a, b, d, f+2; a+2, b+r, f | 1)`` for ``r`` in ``{1, 2}``.

    For ``r = 1`` with ``closed=False`` the intermediate form with a
    remaining 3F2 is used instead of the fully summed one.
    """
    if r not in (1, 2):
        raise ValueError("r must be 1 or 2")
    e = b + r
    if complex(e - b - d).real <= 0:
        raise ConstraintViolation("need Re(1 - d) > 0")
    lhs = eval_unit(HypSpec((a, b, d, f + 2), (a + 2, e, f)))
    A = example3_constant_a(a, b, f)
    lam = example3_root(a, b, f)
    if r == 1:
        pre = _safe_gamma_ratio([b + 1, 1 - d], [e - d])
        if not closed:
            acc = Combo().add(A)
            acc.add_series(1 - A, eval_unit(HypSpec((d, a - b, lam + 1), (a + 2, lam))))
            return make_residual("EX3_SUM", lhs, acc.scaled(pre))
        inner = (_safe_gamma_ratio([a + 2, b - d + 2], [b + 2, a - d + 2])
                 * (1 - d * (a - b) / (lam * (d - b - 1))))
        return make_residual("EX3_SUM", lhs, _exact(pre * (A + (1 - A) * inner)))
    pre = _safe_gamma_ratio([b + 2, 2 - d], [b - d + 2])
    inner = (_safe_gamma_ratio([a + 1, b - d + 3], [b + 2, a - d + 2])
             * (1 - (d - 1) * (a - b - 1) / ((lam - 1) * (d - b - 2))) - 1)
    val = pre * (A + (1 - A) * (a + 1) * (lam - 1) / (lam * (d - 1) * (a - b - 1)) * inner)
    return make_residual("EX3_SUM", lhs, _exact(val))


def example4_6f5(a, b, d, e, f1, f2, f3) -> Residual:
    """The ``r = 3``, ``m = (1, 1, 2)``, ``q = 2`` case of the non-terminating
    transformation, written with explicit constants ``B1``, ``B2`` and root."""
    spec = IpdSpec((f1, f2, f3), (1, 1, 2))
    _thm6_check(a, b, d, e, spec, 2)
    m = 4
    lhs = _ipd_unit((a, b, d), (a + 2, e), spec)
    g1 = _safe_gamma_ratio([e, e - b - d - 2], [e - d, e - b - 2])
    b1 = 0j
    for j in range(3):
        inner = 0j
        for k in range(j + 1):
            f43 = eval_series(HypSpec((-k,) + spec.top, spec.f), 1.0).value
            f32 = eval_series(HypSpec((k - 4, k - j, -b - 2), (k - 2, a - b - 2 + k)), 1.0).value
            inner += (pochhammer(-j, k) * pochhammer(a, k) * pochhammer(b, k)
                      / (pochhammer(-2, k) * pochhammer(a - b - 2, k) * math.factorial(k)) * f43 * f32)
        b1 += (pochhammer(-2, j) * pochhammer(a - b - 2, j) * pochhammer(d, j)
               / (pochhammer(a + 2, j) * pochhammer(e - b - 2, j) * math.factorial(j)) * inner)
    b1 *= g1
    fm = pochhammer_ipd(spec)
    bracket = (a + m) * pochhammer_ipd(spec, -a) - a * pochhammer_ipd(spec, -a - 1)
    b2 = (_safe_gamma_ratio([e, e - b - d - 2], [e - d, e - b + 1]) * pochhammer(d, 3)
          * pochhammer(b, 3) * bracket / (pochhammer(a + 2, 3) * fm))
    p1 = prod(fj - a - 1 for fj in spec.f)
    p2 = prod(fj - a - 1 + mj for fj, mj in zip(spec.f, spec.m))
    gam = (a * p1 - (a + m) * p2) / (a * p1 / (a - b + 1) - p2) - 3
    tail = eval_unit(HypSpec((1, a - b + 1, d + 3, gam + 4), (a + 5, e - b + 1, gam + 3)))
    acc = Combo().add(b1)
    acc.add_series(-b2, tail)
    return make_residual("EX4", lhs, acc.report(), extras={"gamma": gam})


def example4_4f4(b, f1, f2, f3, x) -> Residual:
    """Kummer-type ``q = m - 2`` case for ``r = 3``, ``m = (1, 1, 2)``, with constant ``B``."""
    spec = IpdSpec((f1, f2, f3), (1, 1, 2))
    x = complex(x)
    lhs = scaled(eval_series(HypSpec((b,) + spec.top, (b + 2,) + spec.f), x), cmath.exp(-x))
    acc = Combo()
    for j in range(3):
        acc.add((-x) ** j / math.factorial(j)
                * eval_series(HypSpec((-j, b) + spec.top, (b + 2,) + spec.f), 1.0).value)
    big_b = (((b + 4) * (f1 - b) * (f2 - b) * pochhammer(f3 - b, 2)
              - b * (f1 - b - 1) * (f2 - b - 1) * pochhammer(f3 - b - 1, 2))
             / (pochhammer(b + 2, 3) * f1 * f2 * f3 * (f3 + 1)))
    lam = 1 + b - b * (f1 - b - 1) * (f2 - b - 1) * (f3 - b - 1) / ((f1 - b) * (f2 - b) * (f3 - b + 1))
    acc.add_series((-x) ** 3 * big_b, eval_series(HypSpec((1, lam + 4), (b + 5, lam + 3)), -x))
    return make_residual("EX4", lhs, acc.report(), extras={"lambda": lam})
