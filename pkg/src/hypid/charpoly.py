"""Characteristic polynomials of IPD series, their reduced forms, and roots.

Notation: ``spec`` carries the pairs ``(f_j + m_j, f_j)`` and ``m`` is the
total shift ``sum(m_j)``.  ``C_k`` are the coefficients ``C_{k,r}`` that
appear in every polynomial below.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.optimize import linear_sum_assignment

from .arith import (IpdSpec, distance_to_set, pochhammer, pochhammer_ipd, sigma_coeffs,
                    stirling2)
from .errors import (DegenerateNormalizer, IdenticallyZero, IllConditioned,
                     InconsistencyError, MatchingFailure)
from .hyp import HypSpec, eval_series

#: Relative threshold for declaring a polynomial identically zero.
ZERO_TOL = 1e-12
#: Backward-error bound accepted for polished roots.
ROOT_RESIDUAL_TOL = 1e-8
#: Agreement required between dual formulas.
DUAL_TOL = 1e-10
#: Snap tolerance for normalizers that should vanish.
SNAP_TOL = 1e-9


@dataclass
class CPoly:
    """Polynomial with complex coefficients in ascending order.

    ``scale`` is the largest term magnitude met while assembling the
    coefficients; it is the reference for the zero test.
    """

    coeffs: np.ndarray
    scale: float = 1.0
    degree: int = field(init=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex).ravel()
        if c.size == 0:
            c = np.zeros(1, dtype=complex)
        self.scale = float(max(self.scale, np.max(np.abs(c)), 0.0))
        cut = ZERO_TOL * self.scale
        deg = c.size - 1
        while deg > 0 and abs(c[deg]) <= cut:
            deg -= 1
        self.coeffs = c[:deg + 1]
        self.degree = deg

    @property
    def is_zero(self) -> bool:
        return bool(np.all(np.abs(self.coeffs) <= ZERO_TOL * self.scale))

    def __call__(self, t: complex) -> complex:
        acc = 0j
        for c in self.coeffs[::-1]:
            acc = acc * t + c
        return complex(acc)

    def abs_eval(self, t: complex) -> float:
        """``sum |c_i| |t|^i``, the natural scale of ``|p(t)|``."""
        r = abs(t)
        return float(sum(abs(c) * r ** i for i, c in enumerate(self.coeffs)))


@dataclass
class RootSet:
    roots: list
    residuals: list


def pochhammer_poly(alpha: complex, n: int, sign: int = 1) -> np.ndarray:
    """Coefficients in ``t`` of ``(alpha + sign*t)_n``."""
    out = np.array([1.0 + 0.0j])
    for i in range(n):
        out = npoly.polymul(out, [alpha + i, sign])
    return out


def _pad(c: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros(n, dtype=complex)
    out[:len(c)] = c
    return out


# --- C_{k,r} ---------------------------------------------------------------

def _ckr_stirling(k: int, spec: IpdSpec) -> complex:
    sig = sigma_coeffs(spec)
    acc = sum((sig[j] * stirling2(j, k) for j in range(k, spec.m_total + 1)), 0j)
    return acc / pochhammer_ipd(spec)


def _ckr_series(k: int, spec: IpdSpec) -> complex:
    hs = HypSpec((-k,) + spec.top, spec.f)
    val = eval_series(hs, 1.0).value
    return (-1) ** k / math.factorial(k) * val


@lru_cache(maxsize=4096)
def ckr_all(spec: IpdSpec) -> tuple:
    """All ``C_{k,r}``, ``k = 0..m``, with the two formulas cross-checked.

    Raises
    ------
    InconsistencyError
        The Stirling form and the terminating-series form disagree.
    """
    out = []
    for k in range(spec.m_total + 1):
        a = _ckr_stirling(k, spec)
        b = _ckr_series(k, spec)
        if abs(a - b) > DUAL_TOL * max(1.0, abs(a), abs(b)):
            raise InconsistencyError(f"C_{k} forms disagree: {a} vs {b}")
        out.append(a)
    return tuple(out)


def ckr(k: int, spec: IpdSpec) -> complex:
    """Coefficient ``C_{k,r}``; zero outside ``0 <= k <= m``."""
    if k < 0 or k > spec.m_total:
        return 0j
    return ckr_all(spec)[k]


def ckr_stirling(k: int, spec: IpdSpec) -> complex:
    return _ckr_stirling(k, spec)


def ckr_series(k: int, spec: IpdSpec) -> complex:
    return _ckr_series(k, spec)


# --- Q_m and its companion --------------------------------------------------

def _check_normalizer(alpha: complex, m: int, what: str) -> complex:
    """``(alpha)_m`` after checking ``alpha`` stays off ``{0, -1, ..., 1-m}``."""
    if distance_to_set(alpha, range(1 - m, 1)) <= SNAP_TOL:
        raise DegenerateNormalizer(f"({what})_m vanishes")
    return pochhammer(alpha, m)


def qm_value(b: complex, c: complex, spec: IpdSpec, t: complex) -> complex:
    """``Q_m(t)`` from its defining sum."""
    m = spec.m_total
    u = c - b - m
    norm = _check_normalizer(u, m, "c-b-m")
    C = ckr_all(spec)
    acc = sum((pochhammer(b, k) * C[k] * pochhammer(t, k) * pochhammer(u - t, m - k)
               for k in range(m + 1)), 0j)
    return acc / norm


def qm_poly(b: complex, c: complex, spec: IpdSpec) -> CPoly:
    """Characteristic polynomial ``Q_m`` whose roots are the ``zeta``.

    Raises
    ------
    DegenerateNormalizer
        ``(c-b-m)_m = 0``.
    """
    m = spec.m_total
    u = c - b - m
    norm = _check_normalizer(u, m, "c-b-m")
    C = ckr_all(spec)
    acc = np.zeros(m + 1, dtype=complex)
    scale = 0.0
    for k in range(m + 1):
        term = pochhammer(b, k) * C[k] * npoly.polymul(pochhammer_poly(0.0, k),
                                                       pochhammer_poly(u, m - k, -1))
        acc += _pad(term, m + 1)
        scale = max(scale, float(np.max(np.abs(term))))
    return CPoly(acc / norm, scale / abs(norm))


def qmhat_value(a: complex, b: complex, c: complex, spec: IpdSpec, t: complex) -> complex:
    """``Q^_m(t)`` from its defining sum of terminating 3F2 series at unity."""
    m = spec.m_total
    C = ckr_all(spec)
    u, v = c - a - m, c - b - m
    acc = 0j
    for k in range(m + 1):
        inner = eval_series(HypSpec((-m + k, t + k, c - a - b - m), (u + k, v + k)), 1.0).value
        acc += ((-1) ** k * C[k] * pochhammer(a, k) * pochhammer(b, k) * pochhammer(t, k)
                / (pochhammer(u, k) * pochhammer(v, k)) * inner)
    return acc


def interpolate(fun: Callable[[int], complex], degree: int) -> tuple:
    """Coefficients of the degree-``degree`` polynomial through ``(j, fun(j))``.

    Returns ``(coeffs, scale)`` where ``scale`` is the largest sample magnitude.
    """
    nodes = np.arange(degree + 1, dtype=float)
    values = np.array([fun(int(j)) for j in nodes], dtype=complex)
    vander = np.vander(nodes, degree + 1, increasing=True).astype(complex)
    coeffs = np.linalg.solve(vander, values)
    return coeffs, float(np.max(np.abs(values))) if values.size else 0.0


def qmhat_poly(a: complex, b: complex, c: complex, spec: IpdSpec) -> CPoly:
    """Second characteristic polynomial ``Q^_m`` whose roots are the ``eta``.

    Raises
    ------
    DegenerateNormalizer
        ``(c-a-m)_m = 0`` or ``(c-b-m)_m = 0``.
    """
    m = spec.m_total
    _check_normalizer(c - a - m, m, "c-a-m")
    _check_normalizer(c - b - m, m, "c-b-m")
    coeffs, scale = interpolate(lambda t: qmhat_value(a, b, c, spec, t), m)
    return CPoly(coeffs, scale)


# --- reduced polynomials ------------------------------------------------------

def _check_q(q: int, spec: IpdSpec) -> int:
    m = spec.m_total
    if not 0 <= q <= m - 1:
        raise ValueError(f"q must lie in 0..{m - 1}, got {q}")
    return m - q - 1


def r_poly_sum(b: complex, spec: IpdSpec, q: int) -> CPoly:
    """``R_{m-q-1}`` as the sum over ``(b)_k C_k (-1)^k (1-t-k)_{m-q-1}``."""
    n = _check_q(q, spec)
    C = ckr_all(spec)
    acc = np.zeros(n + 1, dtype=complex)
    scale = 0.0
    for k in range(spec.m_total + 1):
        term = pochhammer(b, k) * C[k] * (-1) ** k * pochhammer_poly(1 - k, n, -1)
        acc += term
        scale = max(scale, float(np.max(np.abs(term))))
    return CPoly(acc, scale)


def r_poly_shifted(b: complex, spec: IpdSpec, q: int) -> CPoly:
    """``R_{m-q-1}`` in the form with ``(f-b-k)_m`` weights, exact zeros visible."""
    n = _check_q(q, spec)
    m = spec.m_total
    fm = pochhammer_ipd(spec)
    acc = np.zeros(n + 1, dtype=complex)
    scale = 0.0
    for k in range(n + 1):
        w = (pochhammer_ipd(spec, -b - k) * pochhammer(b, k) / (fm * math.factorial(k))
             * pochhammer(q + 1 - m, k))
        term = w * pochhammer_poly(b + k + 1, n - k, -1)
        acc += _pad(term, n + 1)
        scale = max(scale, float(np.max(np.abs(term))) if term.size else 0.0)
    return CPoly(acc, scale)


def _coeff_agree(p1: CPoly, p2: CPoly, tol: float = DUAL_TOL) -> bool:
    n = max(p1.coeffs.size, p2.coeffs.size)
    diff = np.abs(_pad(p1.coeffs, n) - _pad(p2.coeffs, n))
    ref = max(p1.scale, p2.scale, 1e-300)
    return bool(np.all(diff <= tol * ref))


def r_poly(b: complex, spec: IpdSpec, q: int) -> CPoly:
    """Reduced polynomial ``R_{m-q-1}`` whose roots are the ``lambda``.

    Both the defining sum and the alternative finite form are built and
    compared coefficient-wise.  The returned polynomial is flagged zero
    when the alternative form vanishes identically.
    """
    p1 = r_poly_sum(b, spec, q)
    p2 = r_poly_shifted(b, spec, q)
    if not _coeff_agree(p1, p2):
        raise InconsistencyError("the two forms of R disagree")
    if p2.is_zero:
        return CPoly(np.zeros(1, dtype=complex), p1.scale)
    return p1


def rhat_value(a: complex, b: complex, spec: IpdSpec, q: int, t: complex) -> complex:
    """``R^_{m-q-1}(t)`` from its two-sum definition."""
    _check_q(q, spec)
    m = spec.m_total
    C = ckr_all(spec)
    s1 = 0j
    for k in range(q + 1):
        inner = eval_series(HypSpec((1 - m + q, t + q + 1, 1 - b - k), (a - b + 1, 2 - k + q)),
                            1.0).value
        s1 += (pochhammer(-m + k, q - k + 1) * pochhammer(a, k) * C[k]
               / math.factorial(q - k + 1) * inner)
    s1 *= pochhammer(b, q + 1) / pochhammer(b - a, q + 1)
    s2 = 0j
    for k in range(q + 1, m + 1):
        inner = eval_series(HypSpec((-m + k, t + k, -b - q), (a - b - q + k, k - q)), 1.0).value
        s2 += ((-1) ** k * pochhammer(a, k) * pochhammer(b, k) * C[k]
               * pochhammer(t + q + 1, k - q - 1)
               / (pochhammer(a - b - q, k) * math.factorial(k - q - 1)) * inner)
    return s1 + s2


def _rhat_scale(a, b, spec, q) -> float:
    # magnitude of the building blocks, for the zero test
    C = ckr_all(spec)
    m = spec.m_total
    ref = abs(pochhammer(b, q + 1) / pochhammer(b - a, q + 1))
    return max([1.0, ref] + [abs(pochhammer(a, k) * pochhammer(b, k) * C[k]
                                 / pochhammer(a - b - q, k)) for k in range(m + 1)])


def rhat_poly(a: complex, b: complex, spec: IpdSpec, q: int) -> CPoly:
    """Reduced polynomial ``R^_{m-q-1}`` whose roots are the ``gamma``."""
    n = _check_q(q, spec)
    coeffs, _ = interpolate(lambda t: rhat_value(a, b, spec, q, t), n)
    return CPoly(coeffs, _rhat_scale(a, b, spec, q))


# --- special values -----------------------------------------------------------

def q0_value(b: complex, spec: IpdSpec, q: int, l: int) -> complex:
    """Limit value ``Q_m^0(-l)`` for ``0 <= l <= q``."""
    m = spec.m_total
    C = ckr_all(spec)
    acc = sum((pochhammer(b, k) * C[k] * pochhammer(-l, k) * pochhammer(m - q, l - k)
               for k in range(l + 1)), 0j)
    return acc / pochhammer(-q, l)


def qhat0_value(a: complex, b: complex, spec: IpdSpec, q: int, l: int) -> complex:
    """Limit value ``Q^_m^0(-l)`` for ``0 <= l <= q``.

    The inner 3F2 has bottom ``k-q <= 0``; the top ``k-l`` terminates it
    first, which is the convention used throughout.
    """
    m = spec.m_total
    C = ckr_all(spec)
    acc = 0j
    for k in range(l + 1):
        inner = eval_series(HypSpec((k - m, k - l, -b - q), (k - q, -b - q + a + k)), 1.0).value
        acc += ((-1) ** k * pochhammer(-l, k) * pochhammer(a, k) * pochhammer(b, k) * C[k]
                / (pochhammer(-q, k) * pochhammer(a - b - q, k)) * inner)
    return acc


def r_at(b: complex, spec: IpdSpec, q: int) -> complex:
    """``R_{m-q-1}(-q-1)`` from its short closed form."""
    m = spec.m_total
    _check_q(q, spec)
    C = ckr_all(spec)
    acc = sum((pochhammer(b, k) * C[k] * (-1) ** k * pochhammer(k - m, m - q - 1)
               for k in range(q + 2)), 0j)
    return (-1) ** (m - q + 1) * acc


def rhat_at(a: complex, b: complex, spec: IpdSpec, q: int) -> complex:
    """``R^_{m-q-1}(-q-1)`` from its short closed form."""
    m = spec.m_total
    _check_q(q, spec)
    C = ckr_all(spec)
    acc = sum((pochhammer(-m + k, q + 1 - k) * pochhammer(a, k) * C[k] / math.factorial(q + 1 - k)
               for k in range(q + 2)), 0j)
    return pochhammer(b, q + 1) / pochhammer(b - a, q + 1) * acc


# --- roots --------------------------------------------------------------------

def _polish(p: CPoly, z: complex) -> complex:
    dp = npoly.polyder(p.coeffs)
    best, best_res = z, abs(p(z)) / max(p.abs_eval(z), 1e-300)
    for _ in range(3):
        d = complex(npoly.polyval(z, dp))
        if d == 0:
            break
        z = z - p(z) / d
        res = abs(p(z)) / max(p.abs_eval(z), 1e-300)
        if res < best_res:
            best, best_res = z, res
        else:
            break
    return best


def roots(p: CPoly) -> RootSet:
    """Roots of ``p`` from companion eigenvalues, each Newton-polished once or more.

    The residual of a root is ``|p(z)| / sum |c_i| |z|^i``.  Roots are sorted
    by (real, imag).

    Raises
    ------
    IdenticallyZero
    IllConditioned
    """
    if p.is_zero:
        raise IdenticallyZero("cannot take roots of the zero polynomial")
    if p.degree == 0:
        return RootSet([], [])
    c = p.coeffs
    if p.degree == 1:
        found = [complex(-c[0] / c[1])]
    else:
        found = [complex(z) for z in npoly.polyroots(c)]
    found = [_polish(p, z) for z in found]
    found.sort(key=lambda z: (z.real, z.imag))
    res = [abs(p(z)) / max(p.abs_eval(z), 1e-300) for z in found]
    if any(r > ROOT_RESIDUAL_TOL for r in res):
        raise IllConditioned(f"root residuals {res} exceed {ROOT_RESIDUAL_TOL}")
    return RootSet(found, res)


def root_list(p: CPoly) -> list:
    """Roots as a plain list; empty for the zero polynomial."""
    return [] if p.is_zero else roots(p).roots


# --- limit studies ------------------------------------------------------------

@dataclass
class LimitRow:
    eps: float
    roots: list
    assigned: list       # predicted limit matched to each root
    errors: list
    max_error: float
    zeta1: complex
    ratio: complex


@dataclass
class LimitStudy:
    lemma: int
    q: int
    predicted: list
    predicted_ratio: complex
    rows: list
    extrapolated_ratio: complex
    ratio_rel_err: float
    slope: float

    def as_records(self) -> list:
        out = []
        for row in self.rows:
            for z, target, err in zip(row.roots, row.assigned, row.errors):
                out.append({"eps": row.eps, "root": z, "limit": target, "error": err,
                            "ratio": row.ratio})
        return out


def _match(found: Sequence[complex], predicted: Sequence[complex]) -> list:
    cost = np.abs(np.subtract.outer(np.asarray(found), np.asarray(predicted)))
    rows, cols = linear_sum_assignment(cost)
    order = np.empty(len(found), dtype=int)
    order[rows] = cols
    return [int(i) for i in order]


def lemma_limit_study(spec: IpdSpec, q: int, b: complex, a: Optional[complex] = None,
                      eps_list: Sequence[float] = (1e-3, 1e-4, 1e-5),
                      safety: Optional[float] = None) -> LimitStudy:
    """Track the roots of ``Q_m`` (``a is None``) or ``Q^_m`` as ``c`` tends to
    a degenerate value.

    With ``a is None`` the perturbed parameter is ``c = b + m - q + eps``;
    otherwise ``c = a + m - q + eps``.  Roots at each ``eps`` are assigned to
    the predicted limits ``{0, -1, ..., -q}`` together with the roots of the
    reduced polynomial, and ``eps / zeta_1`` is compared with its predicted
    limit after linear extrapolation in ``eps``.

    Raises
    ------
    MatchingFailure
        Some assignment distance exceeds ``safety`` (default: a quarter of the
        smallest gap between predicted limits, capped at 0.25).
    """
    m = spec.m_total
    _check_q(q, spec)
    eps_list = [float(e) for e in eps_list]
    if any(e <= 0 for e in eps_list) or sorted(eps_list, reverse=True) != eps_list:
        raise ValueError("eps_list must be positive and decreasing")
    if a is None:
        lemma = 1
        reduced = r_poly(b, spec, q)
        pred_ratio = reduced(0.0) / math.factorial(m - q - 1)
        c_base = b + m - q
    else:
        lemma = 2
        reduced = rhat_poly(a, b, spec, q)
        pred_ratio = (-1) ** (q + 1) * reduced(0.0)
        c_base = a + m - q
    predicted = [complex(-j) for j in range(q + 1)] + root_list(reduced)
    if safety is None:
        gaps = [abs(u - v) for i, u in enumerate(predicted) for v in predicted[i + 1:]]
        safety = min([0.25] + [g / 4 for g in gaps])
    rows = []
    for eps in eps_list:
        c = c_base + eps
        poly = qm_poly(b, c, spec) if a is None else qmhat_poly(a, b, c, spec)
        found = roots(poly).roots
        if len(found) != len(predicted):
            raise MatchingFailure(f"expected {len(predicted)} roots, found {len(found)}")
        assign = _match(found, predicted)
        targets = [predicted[i] for i in assign]
        errs = [abs(z - t) for z, t in zip(found, targets)]
        if max(errs) > safety:
            raise MatchingFailure(f"assignment distance {max(errs):.3g} exceeds {safety:.3g}")
        zeta1 = found[assign.index(0)]
        rows.append(LimitRow(eps, found, targets, errs, max(errs), zeta1, eps / zeta1))
    if len(rows) >= 2:
        e1, e2 = rows[-2].eps, rows[-1].eps
        r1, r2 = rows[-2].ratio, rows[-1].ratio
        extrap = (e1 * r2 - e2 * r1) / (e1 - e2)
    else:
        extrap = rows[-1].ratio
    rel = abs(extrap - pred_ratio) / max(abs(pred_ratio), 1e-300)
    if len(rows) >= 2 and all(r.max_error > 0 for r in rows):
        slope = float(np.polyfit(np.log([r.eps for r in rows]),
                                 np.log([r.max_error for r in rows]), 1)[0])
    else:
        slope = math.nan
    return LimitStudy(lemma, q, predicted, pred_ratio, rows, extrap, rel, slope)
