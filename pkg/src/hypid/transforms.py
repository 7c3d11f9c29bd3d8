"""Finite-argument identities for IPD hypergeometric series.

Every public function evaluates both sides of one identity and returns a
:class:`Residual`.  ``y`` always denotes ``x / (x - 1)``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .arith import (INT_TOL, IpdSpec, distance_to_set, pochhammer, pochhammer_ipd,
                    prod)
from .charpoly import (ckr_all, qhat0_value, q0_value, qm_poly, qmhat_poly, r_at,
                       r_poly, rhat_at, rhat_poly, roots)
from .errors import ConstraintViolation, InconsistencyError
from .hyp import EvalReport, HypSpec, eval_ipd_lhs, eval_series

IDENTITY_IDS = ("MP1", "MP2", "MP3", "THM1", "THM2", "THM3", "COR1a", "COR1b", "COR2",
                "COR2alt", "COR3a", "COR3b", "COR4", "COR5a", "COR5b", "COR6", "INTRO_A",
                "INTRO_B", "LIMIT_M1")

#: Agreement required between alternative forms of the same right-hand side.
FORM_TOL = 1e-10
#: A side whose largest partial sum exceeds its value by this factor is flagged.
CANCEL_RATIO = 2.0


@dataclass
class Residual:
    """Both sides of an identity and their discrepancy.

    ``rel_err = abs_err / max(|lhs|, |rhs|, 1)``.  ``extras`` holds
    secondary values such as alternative forms of the right-hand side.
    """

    identity_id: str
    lhs: complex
    rhs: complex
    abs_err: float
    rel_err: float
    lhs_report: EvalReport
    rhs_report: EvalReport
    flags: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return self.lhs_report.converged and self.rhs_report.converged

    def passed(self, tol: float) -> bool:
        return self.converged and self.rel_err <= tol


def make_residual(identity_id: str, lhs: EvalReport, rhs: EvalReport,
                  flags: Sequence[str] = (), extras: Optional[dict] = None) -> Residual:
    abs_err = float(abs(lhs.value - rhs.value))
    rel_err = abs_err / max(abs(lhs.value), abs(rhs.value), 1.0)
    flags = list(flags)
    if any(rep.max_partial > CANCEL_RATIO * max(abs(rep.value), 1e-300) for rep in (lhs, rhs)):
        flags.append("cancellation")
    return Residual(identity_id, complex(lhs.value), complex(rhs.value), abs_err, rel_err, lhs, rhs,
                    flags, dict(extras or {}))


class Combo:
    """Accumulates ``sum coef_i * series_i`` together with a combined report."""

    def __init__(self):
        self.value = 0j
        self.terms = 0
        self.tail = 0.0
        self.converged = True
        self.peak = 0.0

    def add(self, value: complex) -> "Combo":
        self.value += value
        self.peak = max(self.peak, abs(self.value))
        return self

    def add_series(self, coef: complex, rep: EvalReport) -> "Combo":
        self.value += coef * rep.value
        self.terms += rep.terms_used
        self.tail += abs(coef) * rep.tail_bound
        self.converged = self.converged and rep.converged
        self.peak = max(self.peak, abs(self.value), abs(coef) * rep.max_partial)
        return self

    def scaled(self, factor: complex) -> EvalReport:
        return EvalReport(self.value * factor, self.terms, self.tail * abs(factor),
                          self.converged, self.peak * abs(factor))

    def report(self) -> EvalReport:
        return self.scaled(1.0)


def scaled(rep: EvalReport, factor: complex) -> EvalReport:
    return EvalReport(rep.value * factor, rep.terms_used, rep.tail_bound * abs(factor),
                      rep.converged, rep.max_partial * abs(factor))


def _y(x: complex) -> complex:
    return x / (x - 1.0)


def _pow1mx(x: complex, a: complex) -> complex:
    """Principal ``(1 - x)^a``."""
    return (1.0 - x) ** a if complex(a) != 0 else 1.0 + 0.0j


# --- constraint checks --------------------------------------------------------

def _forbid(value: complex, ints, what: str) -> None:
    ints = list(ints)
    if ints and distance_to_set(value, ints) <= INT_TOL:
        raise ConstraintViolation(f"{what} = {value} lies in the excluded set {ints}")


def _forbid_nonpos(value: complex, what: str, depth: int = 64) -> None:
    if abs(complex(value).imag) <= INT_TOL and complex(value).real <= INT_TOL:
        _forbid(value, range(-depth, 1), what)


def _check_q(q: int, spec: IpdSpec) -> None:
    if not isinstance(q, int) or not 0 <= q <= spec.m_total - 1:
        raise ConstraintViolation(f"q must be an integer in 0..{spec.m_total - 1}")


def _ipd_exclusion(u: complex, spec: IpdSpec, q: int, name: str) -> None:
    # f_j - u not in {m - q - m_j, ..., 0} whenever m - q - m_j <= 0
    m = spec.m_total
    for fj, mj in zip(spec.f, spec.m):
        lo = m - q - mj
        if lo <= 0:
            _forbid(fj - u, range(lo, 1), f"f_j - {name}")


def check_mp(identity_id: str, a, b, c, spec: IpdSpec) -> None:
    m = spec.m_total
    _forbid_nonpos(c, "c")
    _forbid(c - b, range(1, m + 1), "c - b")
    if identity_id == "MP3":
        _forbid(c - a, range(1, m + 1), "c - a")
        _forbid(c - a - b, range(1, m + 1), "c - a - b")


def check_thm1(b, spec: IpdSpec, q: int) -> None:
    _check_q(q, spec)
    _forbid_nonpos(b + spec.m_total - q, "b + m - q")
    _ipd_exclusion(b, spec, q, "b")


def check_thm3(a, b, spec: IpdSpec, q: int) -> None:
    _check_q(q, spec)
    m = spec.m_total
    _forbid_nonpos(a + m - q, "a + m - q")
    _forbid(a - b, range(q + 1 - m, q + 1), "a - b")
    _ipd_exclusion(a, spec, q, "a")


# --- classical transformations ------------------------------------------------

def mp_first(a, b, c, spec: IpdSpec, x) -> Residual:
    """``F(a,b,f+m; c,f | x) = (1-x)^-a F(a, c-b-m, zeta+1; c, zeta | y)``."""
    check_mp("MP1", a, b, c, spec)
    x = complex(x)
    lhs = eval_ipd_lhs(a, b, c, spec, x)
    zeta = roots(qm_poly(b, c, spec)).roots
    rep = eval_series(HypSpec((a, c - b - spec.m_total) + tuple(z + 1 for z in zeta),
                              (c,) + tuple(zeta)), _y(x))
    return make_residual("MP1", lhs, scaled(rep, _pow1mx(x, -a)), extras={"zeta": zeta})


def mp_kummer(b, c, spec: IpdSpec, x) -> Residual:
    """``F(b,f+m; c,f | x) = e^x F(c-b-m, zeta+1; c, zeta | -x)``."""
    check_mp("MP2", None, b, c, spec)
    x = complex(x)
    lhs = eval_ipd_lhs(None, b, c, spec, x)
    zeta = roots(qm_poly(b, c, spec)).roots
    rep = eval_series(HypSpec((c - b - spec.m_total,) + tuple(z + 1 for z in zeta),
                              (c,) + tuple(zeta)), -x)
    return make_residual("MP2", lhs, scaled(rep, cmath.exp(x)), extras={"zeta": zeta})


def mp_second(a, b, c, spec: IpdSpec, x) -> Residual:
    """``F(a,b,f+m; c,f | x) = (1-x)^(c-a-b-m) F(c-a-m, c-b-m, eta+1; c, eta | x)``."""
    check_mp("MP3", a, b, c, spec)
    x = complex(x)
    m = spec.m_total
    lhs = eval_ipd_lhs(a, b, c, spec, x)
    eta = roots(qmhat_poly(a, b, c, spec)).roots
    rep = eval_series(HypSpec((c - a - m, c - b - m) + tuple(z + 1 for z in eta),
                              (c,) + tuple(eta)), x)
    return make_residual("MP3", lhs, scaled(rep, _pow1mx(x, c - a - b - m)),
                         extras={"eta": eta})


# --- degenerate theorems ------------------------------------------------------

def _shifted_tail(top: Sequence[complex], bottom: Sequence[complex], rts, shift: int,
                  x: complex) -> EvalReport:
    """``F(top, rts+shift+1; bottom, rts+shift | x)``."""
    return eval_series(HypSpec(tuple(top) + tuple(z + shift + 1 for z in rts),
                               tuple(bottom) + tuple(z + shift for z in rts)), x)


def thm1_rhs(a, b, spec: IpdSpec, q: int, x, confluent: bool = False):
    """Right-hand side of the first (or, with ``confluent``, the Kummer) degenerate identity.

    Returns ``(report, flags, lam)``.
    """
    m = spec.m_total
    c = b + m - q
    z = -x if confluent else _y(x)
    acc = Combo()
    for j in range(q + 1):
        w = pochhammer(-q, j) * q0_value(b, spec, q, j) / (pochhammer(c, j) * math.factorial(j))
        if not confluent:
            w *= pochhammer(a, j)
        acc.add(w * z ** j)
    flags = []
    lam = []
    R = r_poly(b, spec, q)
    if R.is_zero:
        flags.append("zero_reduced_polynomial")
    else:
        lam = roots(R).roots
        coef = z ** (q + 1) * r_at(b, spec, q) / (pochhammer(c, q + 1) * math.factorial(m - q - 1))
        if confluent:
            acc.add_series(coef, _shifted_tail((1,), (b + m + 1,), lam, q + 1, z))
        else:
            coef *= pochhammer(a, q + 1)
            if coef != 0:  # (a)_{q+1} = 0 for a = -n, n <= q
                acc.add_series(coef, _shifted_tail((1, a + q + 1), (b + m + 1,), lam, q + 1, z))
    return acc.report(), flags, lam


def thm1_degenerate(a, b, spec: IpdSpec, q: int, x) -> Residual:
    """Degenerate first transformation, ``c = b + m - q``."""
    check_thm1(b, spec, q)
    x = complex(x)
    lhs = eval_ipd_lhs(a, b, b + spec.m_total - q, spec, x)
    rhs, flags, lam = thm1_rhs(a, b, spec, q, x)
    return make_residual("THM1", scaled(lhs, _pow1mx(x, a)), rhs, flags, {"lambda": lam})


def thm2_degenerate_kummer(b, spec: IpdSpec, q: int, x) -> Residual:
    """Degenerate Kummer-type transformation, ``c = b + m - q``."""
    check_thm1(b, spec, q)
    x = complex(x)
    lhs = eval_ipd_lhs(None, b, b + spec.m_total - q, spec, x)
    rhs, flags, lam = thm1_rhs(None, b, spec, q, x, confluent=True)
    return make_residual("THM2", scaled(lhs, cmath.exp(-x)), rhs, flags, {"lambda": lam})


def thm3_rhs(a, b, spec: IpdSpec, q: int, x):
    m = spec.m_total
    c = a + m - q
    acc = Combo()
    for j in range(q + 1):
        acc.add(pochhammer(-q, j) * pochhammer(a - b - q, j) / (pochhammer(c, j) * math.factorial(j))
                * qhat0_value(a, b, spec, q, j) * x ** j)
    flags = []
    gam = []
    R = rhat_poly(a, b, spec, q)
    if R.is_zero:
        flags.append("zero_reduced_polynomial")
    else:
        gam = roots(R).roots
        coef = (x ** (q + 1) * rhat_at(a, b, spec, q) * pochhammer(b - a, q + 1)
                / pochhammer(c, q + 1))
        acc.add_series(coef, _shifted_tail((1, a - b + 1), (a + m + 1,), gam, q + 1, x))
    return acc.report(), flags, gam


def thm3_degenerate(a, b, spec: IpdSpec, q: int, x) -> Residual:
    """Degenerate second transformation, ``c = a + m - q``."""
    check_thm3(a, b, spec, q)
    x = complex(x)
    lhs = eval_ipd_lhs(a, b, a + spec.m_total - q, spec, x)
    rhs, flags, gam = thm3_rhs(a, b, spec, q, x)
    return make_residual("THM3", scaled(lhs, _pow1mx(x, b + q)), rhs, flags, {"gamma": gam})


# --- corollaries --------------------------------------------------------------

_VARIANT_IDS = {
    ("q0", "first"): "COR1a", ("q0", "kummer"): "COR1b", ("q0", "second"): "COR2",
    ("q0", "second_alt"): "COR2alt",
    ("qm1", "first"): "COR3a", ("qm1", "kummer"): "COR3b", ("qm1", "second"): "COR4",
    ("qm2", "first"): "COR5a", ("qm2", "kummer"): "COR5b", ("qm2", "second"): "COR6",
}


def _variant(kind: str, variant: str) -> str:
    try:
        return _VARIANT_IDS[(kind, variant)]
    except KeyError:
        raise ValueError(f"unknown variant {variant!r}") from None


def _lhs_first(a, b, c, spec, x) -> EvalReport:
    return scaled(eval_ipd_lhs(a, b, c, spec, x), _pow1mx(x, a))


def _lhs_kummer(b, c, spec, x) -> EvalReport:
    return scaled(eval_ipd_lhs(None, b, c, spec, x), cmath.exp(-x))


def _lhs_second(a, b, c, spec, x, power) -> EvalReport:
    return scaled(eval_ipd_lhs(a, b, c, spec, x), _pow1mx(x, power))


def cor2_weight_a(a, b, spec: IpdSpec) -> complex:
    """Constant ``A`` of the alternative q = 0 form of the second transformation."""
    m = spec.m_total
    c = a + m
    C = ckr_all(spec)
    return sum(((-1) ** k * C[k] * pochhammer(a, k) * pochhammer(b, k) * pochhammer(1 - a - m, m - k)
                / (pochhammer(a - b, k) * pochhammer(1 - c + b, m - k)) for k in range(m + 1)), 0j)


def cor_q0(b, spec: IpdSpec, x, a=None, variant: str = "first") -> Residual:
    """Simplified ``q = 0`` forms.

    Variants ``first``/``kummer`` have ``c = b + m``; ``second``/``second_alt``
    have ``c = a + m``.
    """
    ident = _variant("q0", variant)
    x = complex(x)
    m = spec.m_total
    fm = pochhammer_ipd(spec)
    flags = []
    if variant in ("first", "kummer"):
        _forbid_nonpos(b + m, "b + m")
        if m == 1 and spec.r == 1:
            _forbid(spec.f[0] - b, [0], "f - b")
        w = pochhammer(b, m) / fm
        R = r_poly(b, spec, 0)
        lam = []
        if R.is_zero:
            flags.append("zero_reduced_polynomial")  # then w == 1
        else:
            lam = roots(R).roots
        acc = Combo().add(w)
        if variant == "first":
            lhs = _lhs_first(a, b, b + m, spec, x)
            tail = _shifted_tail((1, a), (b + m,), lam, 0, _y(x))
        else:
            lhs = _lhs_kummer(b, b + m, spec, x)
            tail = _shifted_tail((1,), (b + m,), lam, 0, -x)
        acc.add_series(1 - w, tail)
        return make_residual(ident, lhs, acc.report(), flags, {"lambda": lam})
    _forbid_nonpos(a + m, "a + m")
    _forbid(a - b, range(1 - m, 1), "a - b")
    if m == 1 and spec.r == 1:
        _forbid(spec.f[0] - a, [0], "f - a")
    lhs = _lhs_second(a, b, a + m, spec, x, b)
    R = rhat_poly(a, b, spec, 0)
    gam = [] if R.is_zero else roots(R).roots
    if variant == "second":
        coef = x * b * (a * prod(spec.top) / ((a + m) * prod(spec.f)) - 1)
        acc = Combo().add(1.0)
        acc.add_series(coef, _shifted_tail((1, a - b + 1), (a + m + 1,), gam, 1, x))
        return make_residual(ident, lhs, acc.report(), flags, {"gamma": gam})
    A = cor2_weight_a(a, b, spec)
    acc = Combo().add(A)
    acc.add_series(1 - A, _shifted_tail((1, a - b), (a + m,), gam, 0, x))
    return make_residual(ident, lhs, acc.report(), flags, {"gamma": gam, "A": A})


def _karlsson_const(u, spec: IpdSpec) -> complex:
    """``(f - u)_m / (f)_m``."""
    return pochhammer_ipd(spec, -u) / pochhammer_ipd(spec)


def _partial_alt(b, spec: IpdSpec, j: int, weight: Callable[[int], complex]) -> complex:
    C = ckr_all(spec)
    return sum(((-1) ** k * pochhammer(b, k) * weight(k) * C[k] for k in range(j + 1)), 0j)


def _terminating_ipd(j: int, b, c, spec: IpdSpec) -> complex:
    """``F(-j, b, f+m; c, f | 1)``."""
    return eval_series(HypSpec((-j, b) + spec.top, (c,) + spec.f), 1.0).value


def cor_qm1(b, spec: IpdSpec, x, a=None, variant: str = "first") -> Residual:
    """``q = m - 1`` forms (``c = b + 1``, or ``c = a + 1`` for ``second``).

    For ``first`` and ``kummer`` the alternative form with terminating
    ``F(-j, b, f+m; b+1, f | 1)`` coefficients is evaluated too and must agree.
    """
    ident = _variant("qm1", variant)
    x = complex(x)
    m = spec.m_total
    extras = {}
    if variant in ("first", "kummer"):
        _forbid_nonpos(b + 1, "b + 1")
        for fj, mj in zip(spec.f, spec.m):
            _forbid(fj - b, range(1 - mj, 1), "f_j - b")
        z = _y(x) if variant == "first" else -x
        pre = (lambda j: pochhammer(a, j)) if variant == "first" else (lambda j: 1.0)
        acc = Combo()
        alt = 0j
        for j in range(m):
            acc.add(pre(j) / pochhammer(b + 1, j) * z ** j * _partial_alt(b, spec, j, lambda k: 1.0))
            alt += pre(j) / math.factorial(j) * z ** j * _terminating_ipd(j, b, b + 1, spec)
        coef = z ** m * _karlsson_const(b, spec) / pochhammer(b + 1, m)
        if variant == "first":
            coef *= pochhammer(a, m)
            rep = eval_series(HypSpec((1, a + m), (b + m + 1,)), z)
            lhs = _lhs_first(a, b, b + 1, spec, x)
        else:
            rep = eval_series(HypSpec((1,), (b + m + 1,)), z)
            lhs = _lhs_kummer(b, b + 1, spec, x)
        acc.add_series(coef, rep)
        alt += coef * rep.value
        extras["rhs_alt"] = alt
        _check_forms(acc.value, alt, ident)
        return make_residual(ident, lhs, acc.report(), extras=extras)
    _forbid_nonpos(a + 1, "a + 1")
    _forbid(a - b, range(0, m), "a - b")
    for fj, mj in zip(spec.f, spec.m):
        _forbid(fj - a, range(1 - mj, 1), "f_j - a")
    lhs = _lhs_second(a, b, a + 1, spec, x, b + m - 1)
    acc = Combo()
    for j in range(m):
        acc.add(pochhammer(1 - m, j) * pochhammer(a - b - m + 1, j)
                / (pochhammer(a + 1, j) * math.factorial(j)) * qhat0_value(a, b, spec, m - 1, j) * x ** j)
    coef = x ** m * (-1) ** m * pochhammer(b, m) * _karlsson_const(a, spec) / pochhammer(a + 1, m)
    acc.add_series(coef, eval_series(HypSpec((1, 1 - b + a), (a + m + 1,)), x))
    return make_residual(ident, lhs, acc.report(), extras=extras)


def lambda_qm2(b, spec: IpdSpec) -> complex:
    """Closed-form root of ``R_1`` (the case ``q = m - 2``)."""
    return 1 + b - b * prod(f - b - 1 for f in spec.f) / prod(f - b - 1 + mj for f, mj in zip(spec.f, spec.m))


def gamma_qm2(a, b, spec: IpdSpec) -> complex:
    """Closed-form root of ``R^_1`` (the case ``q = m - 2``)."""
    m = spec.m_total
    p1 = prod(f - a - 1 for f in spec.f)
    p2 = prod(f - a - 1 + mj for f, mj in zip(spec.f, spec.m))
    return 1 - m + (a * p1 - (a + m) * p2) / (a * p1 / (a - b + 1) - p2)


def _bracket(u, spec: IpdSpec) -> complex:
    """``(u + m)(f - u)_m - u (f - u - 1)_m``."""
    m = spec.m_total
    return (u + m) * pochhammer_ipd(spec, -u) - u * pochhammer_ipd(spec, -u - 1)


def cor_qm2(b, spec: IpdSpec, x, a=None, variant: str = "first") -> Residual:
    """``q = m - 2`` forms, using the closed-form root of the linear reduced polynomial.

    The closed-form root is compared with the numerical root (``extras``).
    """
    ident = _variant("qm2", variant)
    x = complex(x)
    m = spec.m_total
    if m < 2:
        raise ConstraintViolation("q = m - 2 needs m >= 2")
    fm = pochhammer_ipd(spec)
    extras = {}
    if variant in ("first", "kummer"):
        _forbid_nonpos(b + 2, "b + 2")
        for fj, mj in zip(spec.f, spec.m):
            if mj >= 2:
                _forbid(fj - b, range(2 - mj, 1), "f_j - b")
        lam = lambda_qm2(b, spec)
        extras["root"] = lam
        extras["root_numeric"] = _numeric_root(r_poly(b, spec, m - 2))
        z = _y(x) if variant == "first" else -x
        pre = (lambda j: pochhammer(a, j)) if variant == "first" else (lambda j: 1.0)
        acc = Combo()
        alt = 0j
        for j in range(m - 1):
            acc.add(pre(j) / pochhammer(b + 2, j) * z ** j
                    * _partial_alt(b, spec, j, lambda k, j=j: j - k + 1))
            alt += pre(j) / math.factorial(j) * z ** j * _terminating_ipd(j, b, b + 2, spec)
        coef = z ** (m - 1) * _bracket(b, spec) / (pochhammer(b + 2, m - 1) * fm)
        if variant == "first":
            coef *= pochhammer(a, m - 1)
            rep = eval_series(HypSpec((1, a + m - 1, lam + m), (b + m + 1, lam + m - 1)), z)
            lhs = _lhs_first(a, b, b + 2, spec, x)
        else:
            rep = eval_series(HypSpec((1, lam + m), (b + m + 1, lam + m - 1)), z)
            lhs = _lhs_kummer(b, b + 2, spec, x)
        acc.add_series(coef, rep)
        alt += coef * rep.value
        extras["rhs_alt"] = alt
        _check_forms(acc.value, alt, ident)
        return make_residual(ident, lhs, acc.report(), extras=extras)
    _forbid_nonpos(a + 2, "a + 2")
    _forbid(a - b, range(-1, m - 1), "a - b")
    for fj, mj in zip(spec.f, spec.m):
        if mj >= 2:
            _forbid(fj - a, range(2 - mj, 1), "f_j - a")
    gam = gamma_qm2(a, b, spec)
    extras["root"] = gam
    extras["root_numeric"] = _numeric_root(rhat_poly(a, b, spec, m - 2))
    lhs = _lhs_second(a, b, a + 2, spec, x, b + m - 2)
    acc = Combo()
    for j in range(m - 1):
        acc.add(pochhammer(2 - m, j) * pochhammer(a - b - m + 2, j)
                / (pochhammer(a + 2, j) * math.factorial(j)) * qhat0_value(a, b, spec, m - 2, j) * x ** j)
    coef = x ** (m - 1) * (-1) ** (m - 1) * pochhammer(b, m - 1) * _bracket(a, spec) / (
        pochhammer(a + 2, m - 1) * fm)
    acc.add_series(coef, eval_series(HypSpec((1, a - b + 1, gam + m), (a + m + 1, gam + m - 1)), x))
    return make_residual(ident, lhs, acc.report(), extras=extras)


def _numeric_root(p) -> Optional[complex]:
    if p.is_zero:
        return None
    r = roots(p).roots
    return r[0] if r else None


def _check_forms(v1: complex, v2: complex, ident: str) -> None:
    if abs(v1 - v2) > FORM_TOL * max(1.0, abs(v1), abs(v2)):
        raise InconsistencyError(f"{ident}: alternative forms disagree ({v1} vs {v2})")


# --- r = m = 1 warm-up identities -----------------------------------------------

def limit_m1(eps: float, alpha, top: Sequence[complex], bottom: Sequence[complex], x) -> Residual:
    """``F(eps, top; alpha*eps, bottom | x)`` against its ``eps -> 0`` limit."""
    x = complex(x)
    lhs = eval_series(HypSpec((eps,) + tuple(top), (alpha * eps,) + tuple(bottom)), x)
    inner = eval_series(HypSpec(tuple(top), tuple(bottom)), x)
    rhs = Combo().add(1 - 1 / alpha)
    rhs.add_series(1 / alpha, inner)
    return make_residual("LIMIT_M1", lhs, rhs.report(), extras={"eps": eps})


def intro_identities(a, b, f, x, which: str = "first", eps: float = 1e-6) -> Residual:
    """The two ``r = m = 1`` identities for ``(1-x)^b F(a, b, f+1; a+1, f | x)``.

    ``first`` has a ``2F1(1, a-b; a+1 | x)`` tail, ``second`` a
    ``2F1(1, b; a+1 | y)`` tail.  The generating limit formula is checked
    at ``eps`` and stored in ``extras['limit_rel_err']``.
    """
    x = complex(x)
    _forbid(f, [0], "f")
    _forbid_nonpos(a + 1, "a + 1")
    spec = IpdSpec((f,), (1,))
    lhs = _lhs_second(a, b, a + 1, spec, x, b)
    if which == "first":
        _forbid(a - b, [0], "a - b")
        k = b * (a - f) / (f * (a - b))
        top, z, ident = (1, a - b), x, "INTRO_A"
    elif which == "second":
        k = (f - a) / f
        top, z, ident = (1, b), _y(x), "INTRO_B"
    else:
        raise ValueError(f"unknown variant {which!r}")
    acc = Combo().add(1 - k)
    acc.add_series(k, eval_series(HypSpec(top, (a + 1,)), z))
    extras = {}
    if k != 0:
        # the right-hand side is the eps -> 0 limit with alpha = 1/k
        extras["limit_rel_err"] = limit_m1(eps, 1 / k, top, (a + 1,), z).rel_err
    return make_residual(ident, lhs, acc.report(), extras=extras)


# --- generic dispatch ---------------------------------------------------------

@dataclass
class IdentityCase:
    """One instance of a finite-argument identity.

    ``params`` holds the scalar parameters by name (``a``, ``b``, ``c``,
    ``q``; ``alpha``, ``eps``, ``top``, ``bottom`` for ``LIMIT_M1``; ``f``
    for the warm-up identities).  Constraints are checked on construction.
    """

    identity_id: str
    params: dict
    spec: Optional[IpdSpec]
    x: complex
    tol: float = 1e-6

    def __post_init__(self):
        if self.identity_id not in IDENTITY_IDS:
            raise ValueError(f"unknown identity {self.identity_id!r}")
        self.x = complex(self.x)
        check_constraints(self.identity_id, self.params, self.spec)

    def residual(self) -> Residual:
        return evaluate(self.identity_id, self.params, self.spec, self.x)

    def lhs(self) -> complex:
        return self.residual().lhs

    def rhs(self) -> complex:
        return self.residual().rhs


def check_constraints(identity_id: str, p: dict, spec: Optional[IpdSpec]) -> None:
    """Raise ConstraintViolation when ``p`` violates the identity's hypotheses."""
    a, b, c, q = p.get("a"), p.get("b"), p.get("c"), p.get("q")
    m = spec.m_total if spec is not None else 0
    if identity_id in ("MP1", "MP2", "MP3"):
        check_mp(identity_id, a, b, c, spec)
    elif identity_id in ("THM1", "THM2"):
        check_thm1(b, spec, q)
    elif identity_id == "THM3":
        check_thm3(a, b, spec, q)
    elif identity_id in ("COR1a", "COR1b"):
        _forbid_nonpos(b + m, "b + m")
        if m == 1 and spec.r == 1:
            _forbid(spec.f[0] - b, [0], "f - b")
    elif identity_id in ("COR2", "COR2alt"):
        _forbid_nonpos(a + m, "a + m")
        _forbid(a - b, range(1 - m, 1), "a - b")
        if m == 1 and spec.r == 1:
            _forbid(spec.f[0] - a, [0], "f - a")
    elif identity_id in ("COR3a", "COR3b"):
        _forbid_nonpos(b + 1, "b + 1")
        for fj, mj in zip(spec.f, spec.m):
            _forbid(fj - b, range(1 - mj, 1), "f_j - b")
    elif identity_id == "COR4":
        _forbid_nonpos(a + 1, "a + 1")
        _forbid(a - b, range(0, m), "a - b")
        for fj, mj in zip(spec.f, spec.m):
            _forbid(fj - a, range(1 - mj, 1), "f_j - a")
    elif identity_id in ("COR5a", "COR5b", "COR6"):
        if m < 2:
            raise ConstraintViolation("q = m - 2 needs m >= 2")
        u = a if identity_id == "COR6" else b
        _forbid_nonpos(u + 2, "u + 2")
        if identity_id == "COR6":
            _forbid(a - b, range(-1, m - 1), "a - b")
        for fj, mj in zip(spec.f, spec.m):
            if mj >= 2:
                _forbid(fj - u, range(2 - mj, 1), "f_j - u")
    elif identity_id in ("INTRO_A", "INTRO_B"):
        _forbid(p["f"], [0], "f")
        _forbid_nonpos(a + 1, "a + 1")
        if identity_id == "INTRO_A":
            _forbid(a - b, [0], "a - b")
    elif identity_id == "LIMIT_M1":
        if p.get("alpha", 0) == 0:
            raise ConstraintViolation("alpha must be nonzero")


def evaluate(identity_id: str, p: dict, spec: Optional[IpdSpec], x: complex) -> Residual:
    """Evaluate a catalog identity by id."""
    a, b, c, q = p.get("a"), p.get("b"), p.get("c"), p.get("q")
    table = {
        "MP1": lambda: mp_first(a, b, c, spec, x),
        "MP2": lambda: mp_kummer(b, c, spec, x),
        "MP3": lambda: mp_second(a, b, c, spec, x),
        "THM1": lambda: thm1_degenerate(a, b, spec, q, x),
        "THM2": lambda: thm2_degenerate_kummer(b, spec, q, x),
        "THM3": lambda: thm3_degenerate(a, b, spec, q, x),
        "COR1a": lambda: cor_q0(b, spec, x, a=a, variant="first"),
        "COR1b": lambda: cor_q0(b, spec, x, variant="kummer"),
        "COR2": lambda: cor_q0(b, spec, x, a=a, variant="second"),
        "COR2alt": lambda: cor_q0(b, spec, x, a=a, variant="second_alt"),
        "COR3a": lambda: cor_qm1(b, spec, x, a=a, variant="first"),
        "COR3b": lambda: cor_qm1(b, spec, x, variant="kummer"),
        "COR4": lambda: cor_qm1(b, spec, x, a=a, variant="second"),
        "COR5a": lambda: cor_qm2(b, spec, x, a=a, variant="first"),
        "COR5b": lambda: cor_qm2(b, spec, x, variant="kummer"),
        "COR6": lambda: cor_qm2(b, spec, x, a=a, variant="second"),
        "INTRO_A": lambda: intro_identities(a, b, p["f"], x, "first"),
        "INTRO_B": lambda: intro_identities(a, b, p["f"], x, "second"),
        "LIMIT_M1": lambda: limit_m1(p["eps"], p["alpha"], p["top"], p["bottom"], x),
    }
    return table[identity_id]()
