"""Generalized hypergeometric series with explicit tail control.

``eval_series`` sums a power series inside its disk of convergence (or any
terminating series) and stops on a rigorous ratio majorant of the tail.
``eval_unit`` handles the unit argument, where convergence is algebraic and
the partial sums are extrapolated.
"""
from __future__ import annotations

import contextlib
import contextvars
import math
import os
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .arith import IpdSpec, ParamVec, as_vec, nearest_int
from .errors import BottomPole, NonConvergent

#: Default cap on the number of series terms.
DEFAULT_TERM_CAP = 1_000_000
#: Tolerance used to recognise terminating top parameters and bottom poles.
TERMINATION_TOL = 1e-12


_TERM_CAP: contextvars.ContextVar = contextvars.ContextVar("term_cap", default=None)


@contextlib.contextmanager
def term_cap(value: Optional[int]):
    """Temporarily set the default term cap (the environment variable still wins)."""
    token = _TERM_CAP.set(value)
    try:
        yield
    finally:
        _TERM_CAP.reset(token)


def term_cap_default() -> int:
    """Term cap: ``HYPID_TERM_CAP`` if set, else the active ``term_cap`` context, else 10^6."""
    raw = os.environ.get("HYPID_TERM_CAP")
    if raw:
        try:
            value = int(raw)
        except ValueError as exc:
            raise ValueError(f"HYPID_TERM_CAP must be an integer, got {raw!r}") from exc
        if value < 1:
            raise ValueError("HYPID_TERM_CAP must be positive")
        return value
    return _TERM_CAP.get() or DEFAULT_TERM_CAP


def _canonical(v: Sequence[complex]) -> ParamVec:
    return tuple(sorted(as_vec(v), key=lambda z: (z.real, z.imag)))


def _nonpos_int(z: complex) -> Optional[int]:
    k = nearest_int(z, TERMINATION_TOL)
    return -k if k is not None and k <= 0 else None


@dataclass(frozen=True)
class HypSpec:
    """Parameters of ``pFq(top; bottom; x)``.

    Both vectors are stored in canonical (real, imag) order so that the
    value does not depend on how the caller listed them.
    """

    top: ParamVec
    bottom: ParamVec

    def __post_init__(self):
        object.__setattr__(self, "top", _canonical(self.top))
        object.__setattr__(self, "bottom", _canonical(self.bottom))

    @property
    def p(self) -> int:
        return len(self.top)

    @property
    def q(self) -> int:
        return len(self.bottom)

    @property
    def terminating_index(self) -> Optional[int]:
        """Index of the top parameter ``-N`` with the smallest ``N``, if any."""
        best = None
        for i, a in enumerate(self.top):
            n = _nonpos_int(a)
            if n is not None and (best is None or n < best[1]):
                best = (i, n)
        return None if best is None else best[0]

    @property
    def degree(self) -> Optional[int]:
        """Number ``N`` such that the series is a polynomial of degree ``N``."""
        i = self.terminating_index
        return None if i is None else _nonpos_int(self.top[i])

    @property
    def excess(self) -> complex:
        """Parametric excess ``sum(bottom) - sum(top)``."""
        return sum(self.bottom, 0j) - sum(self.top, 0j)

    def check_bottom(self) -> None:
        """Raise BottomPole if a bottom parameter is hit before termination."""
        n = self.degree
        for b in self.bottom:
            k = _nonpos_int(b)
            if k is not None and (n is None or n > k):
                raise BottomPole(f"bottom parameter {b} is a pole of the series")


@dataclass
class EvalReport:
    """Outcome of a series evaluation.

    Attributes
    ----------
    value : complex
    terms_used : int
    tail_bound : float
        Bound (or, at unit argument, estimate) of the absolute truncation error.
    converged : bool
    max_partial : float
        Largest partial-sum magnitude seen; large values relative to ``|value|``
        signal cancellation.
    """

    value: complex
    terms_used: int
    tail_bound: float
    converged: bool
    max_partial: float = 0.0


def _ratio(top: ParamVec, bottom: ParamVec, k: int) -> complex:
    num = 1.0 + 0.0j
    for a in top:
        num *= a + k
    den = complex(k + 1)
    for b in bottom:
        den *= b + k
    return num / den


def _ratio_majorant(abs_top, abs_bottom, k: int) -> float:
    """Upper bound of ``|t_{j+1}/t_j|`` valid for every ``j >= k``.

    Each top factor is paired with a denominator factor; a pair
    ``(j+alpha)/(j-beta)`` is monotone in ``j``, so its supremum over
    ``j >= k`` is either its value at ``k`` or its limit 1.
    """
    den_shifts = [-1.0] + list(abs_bottom)
    if k <= max(den_shifts):
        return math.inf
    bound = 1.0
    for i, alpha in enumerate(abs_top):
        beta = den_shifts[i] if i < len(den_shifts) else None
        if beta is None:
            return math.inf
        bound *= max(1.0, (k + alpha) / (k - beta))
    for beta in den_shifts[len(abs_top):]:
        bound /= k - beta
    return bound


def _sum_terminating(spec: HypSpec, x: complex, n: int) -> EvalReport:
    total = 0j
    term = 1.0 + 0.0j
    peak = 0.0
    for k in range(n + 1):
        total += term
        peak = max(peak, abs(total))
        if k < n:
            term *= _ratio(spec.top, spec.bottom, k) * x
    return EvalReport(total, n + 1, 0.0, True, peak)


def eval_series(spec: HypSpec, x: complex, rel_tol: float = 1e-15,
                term_cap: Optional[int] = None) -> EvalReport:
    """Sum ``pFq(top; bottom; x)``.

    Parameters
    ----------
    spec : HypSpec
    x : complex
    rel_tol : float
        Target for ``tail_bound / |value|``.
    term_cap : int, optional
        Maximum number of terms; defaults to ``term_cap_default()``.

    Returns
    -------
    EvalReport

    Raises
    ------
    BottomPole
        A bottom parameter is a non-positive integer reached before termination.
    NonConvergent
        ``x`` lies outside the disk of convergence of a non-terminating series.
    """
    x = complex(x)
    spec.check_bottom()
    n = spec.degree
    if n is not None:
        return _sum_terminating(spec, x, n)
    if x == 0:
        return EvalReport(1.0 + 0.0j, 1, 0.0, True, 1.0)
    if spec.p > spec.q + 1:
        raise NonConvergent(f"{spec.p}F{spec.q} diverges for every x != 0")
    if spec.p == spec.q + 1:
        if x == 1:
            return eval_unit(spec, rel_tol=rel_tol, term_cap=term_cap)
        if abs(x) >= 1:
            raise NonConvergent(f"|x| = {abs(x)} outside the disk of convergence")
    cap = term_cap or term_cap_default()
    abs_top = sorted((abs(a) for a in spec.top), reverse=True)
    abs_bottom = sorted(abs(b) for b in spec.bottom)
    total = 0j
    term = 1.0 + 0.0j
    peak = 0.0
    quiet = 0
    tail = math.inf
    k = 0
    while k < cap:
        total += term
        peak = max(peak, abs(total))
        ratio = _ratio(spec.top, spec.bottom, k) * x
        nxt = term * ratio
        maj = abs(x) * _ratio_majorant(abs_top, abs_bottom, k + 1)
        if maj < 1.0:
            tail = abs(nxt) / (1.0 - maj)
            quiet = quiet + 1 if tail <= rel_tol * abs(total) else 0
            if quiet >= 3 or nxt == 0:
                return EvalReport(total, k + 1, tail, True, peak)
        term = nxt
        k += 1
    return EvalReport(total, k, tail, tail <= rel_tol * max(1.0, abs(total)), peak)


def eval_unit(spec: HypSpec, rel_tol: float = 1e-13, term_cap: Optional[int] = None,
              accelerate: bool = True) -> EvalReport:
    """Evaluate ``pFq(top; bottom; 1)``.

    For ``p = q + 1`` the terms decay like ``k^(-s-1)`` with ``s`` the
    parametric excess, so plain summation needs about ``tol^(-1/s)`` terms.
    With ``accelerate`` (the default) partial sums at ``N0 * 2^i`` terms are
    Richardson-extrapolated with the known exponents ``s, s+1, ...``; the
    error estimate is the change between the last two diagonal entries.

    Raises
    ------
    NonConvergent
        ``p > q + 1``, or ``Re(s) <= 0`` for a non-terminating ``q+1 F q``.
    """
    spec.check_bottom()
    n = spec.degree
    if n is not None:
        return _sum_terminating(spec, 1.0, n)
    if spec.p <= spec.q:
        return eval_series(spec, 1.0, rel_tol=rel_tol, term_cap=term_cap)
    if spec.p > spec.q + 1:
        raise NonConvergent(f"{spec.p}F{spec.q} diverges at x = 1")
    s = spec.excess
    if s.real <= 0:
        raise NonConvergent(f"parametric excess {s} has non-positive real part")
    cap = term_cap or term_cap_default()
    scale = max([1.0] + [abs(z) for z in spec.top + spec.bottom])
    n0 = max(32, 8 * math.ceil(scale))
    if not accelerate:
        return _unit_plain(spec, s, rel_tol, cap, n0)

    total = 0j
    term = 1.0 + 0.0j
    peak = 0.0
    k = 0
    table: list[list[complex]] = []
    checkpoint = n0
    best = None
    stale = 0
    while checkpoint <= cap:
        total, term, chunk_peak = _sum_chunk(spec, k, checkpoint, total, term)
        peak = max(peak, chunk_peak)
        k = checkpoint
        row = [total]
        for j, prev in enumerate(table[-1] if table else []):
            w = 2.0 ** (s + j)
            row.append((w * row[j] - prev) / (w - 1.0))
        table.append(row)
        if len(table) >= 3:
            est = abs(row[-1] - table[-2][-1])
            if est <= rel_tol * abs(row[-1]):
                return EvalReport(row[-1], k, est, True, peak)
            if best is None or est < best[1]:
                best = (row[-1], est)
                stale = 0
            else:
                stale += 1
                if stale >= 3:
                    break  # rounding floor reached
        checkpoint *= 2
    if best is None:
        return EvalReport(total, k, math.inf, False, peak)
    value, est = best
    return EvalReport(value, k, est, est <= rel_tol * max(1.0, abs(value)), peak)


def _sum_chunk(spec: HypSpec, k0: int, k1: int, total: complex, term: complex):
    """Add terms ``k0 .. k1-1`` (``term`` is term ``k0``) to ``total``."""
    ks = np.arange(k0, k1, dtype=float)
    num = np.ones(len(ks), dtype=complex)
    for a in spec.top:
        num *= a + ks
    den = ks + 1.0
    den = den.astype(complex)
    for b in spec.bottom:
        den *= b + ks
    ratios = num / den
    terms = np.empty(len(ks), dtype=complex)
    terms[0] = term
    if len(ks) > 1:
        terms[1:] = term * np.cumprod(ratios[:-1])
    partial = total + np.cumsum(terms)
    return complex(partial[-1]), complex(terms[-1] * ratios[-1]), float(np.max(np.abs(partial)))


def _unit_plain(spec: HypSpec, s: complex, rel_tol: float, cap: int, n0: int) -> EvalReport:
    total = 0j
    term = 1.0 + 0.0j
    peak = 0.0
    quiet = 0
    est = math.inf
    for k in range(cap):
        total += term
        peak = max(peak, abs(total))
        term *= _ratio(spec.top, spec.bottom, k)
        if k >= n0:
            # sum_{j>k} j^(-s-1) ~ k^(-s)/s
            est = abs(term) * (k + 1) / s.real
            quiet = quiet + 1 if est <= rel_tol * abs(total) else 0
            if quiet >= 3:
                return EvalReport(total, k + 1, est, True, peak)
    return EvalReport(total, cap, est, False, peak)


def ipd_spec(a_opt: Optional[complex], b: complex, c: complex, spec: IpdSpec) -> HypSpec:
    """HypSpec with top ``(a?, b, f+m)`` and bottom ``(c, f)``."""
    top = ([] if a_opt is None else [a_opt]) + [b] + list(spec.top)
    return HypSpec(tuple(top), (c,) + spec.f)


def eval_ipd_lhs(a_opt: Optional[complex], b: complex, c: complex, spec: IpdSpec,
                 x: complex, rel_tol: float = 1e-15) -> EvalReport:
    """Evaluate the IPD series ``F(a?, b, f+m; c, f | x)``."""
    hs = ipd_spec(a_opt, b, c, spec)
    if complex(x) == 1:
        return eval_unit(hs, rel_tol=max(rel_tol, 1e-14))
    return eval_series(hs, x, rel_tol=rel_tol)
