"""Regression corpus: the worked examples, each at three fixed instantiations.

Formulas are written out with their explicit constants (closed-form roots,
``A``, ``B``, ``B1``, ``B2``) rather than routed through the general
machinery, so they act as an independent check on it.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .arith import IpdSpec, pochhammer
from .charpoly import r_poly, rhat_poly, rhat_value, roots
from .hyp import EvalReport, HypSpec, eval_series, eval_unit
from .summation import (cor_q0_unit, example2_chain, example3_constant_a, example3_root,
                        example3_sum, example4_4f4, example4_6f5)
from .transforms import Combo, Residual, intro_identities, make_residual, scaled

FINITE_TOL = 1e-8
UNIT_TOL = 1e-6
ROOT_TOL = 1e-9


@dataclass(frozen=True)
class GoldenCase:
    name: str
    kind: str          # "finite", "unit" or "root"
    params: tuple
    run: Callable[[], Residual]

    @property
    def tol(self) -> float:
        return {"finite": FINITE_TOL, "unit": UNIT_TOL, "root": ROOT_TOL}[self.kind]


def _exact(v: complex) -> EvalReport:
    return EvalReport(complex(v), 0, 0.0, True, abs(v))


def _compare(name: str, closed: complex, numeric: complex) -> Residual:
    return make_residual(name, _exact(closed), _exact(numeric))


# --- r = 1, m = 2, q = 0, first transformation --------------------------------------

def ex1_lambda(b, f) -> complex:
    return (f + b + 1) / (f - b + 1)


def ex1_root(b, f) -> Residual:
    return _compare("ex1_root", ex1_lambda(b, f), roots(r_poly(b, IpdSpec((f,), (2,)), 0)).roots[0])


def ex1_r1(b, f, t) -> Residual:
    explicit = (1 - t) + (2 * b / f) * t - pochhammer(b, 2) / pochhammer(f, 2) * (t + 1)
    return _compare("ex1_r1", explicit, r_poly(b, IpdSpec((f,), (2,)), 0)(t))


def ex1_finite(a, b, f, x) -> Residual:
    x = complex(x)
    lam = ex1_lambda(b, f)
    lhs = eval_series(HypSpec((a, b, f + 2), (b + 2, f)), x)
    acc = Combo().add(pochhammer(b, 2))
    acc.add_series(pochhammer(f, 2) - pochhammer(b, 2),
                   eval_series(HypSpec((a, 1, lam + 1), (b + 2, lam)), x / (x - 1)))
    return make_residual("ex1_finite", scaled(lhs, pochhammer(f, 2) * (1 - x) ** a), acc.report())


def ex1_thomae(n, b, d, e, f) -> Residual:
    lam = ex1_lambda(b, f)
    lhs = eval_unit(HypSpec((-n, b, d, f + 2), (b + 2, e, f)))
    pre = pochhammer(e, n) * pochhammer(f, 2) / pochhammer(e - d, n)
    acc = Combo().add(pochhammer(b, 2))
    acc.add_series(pochhammer(f, 2) - pochhammer(b, 2),
                   eval_unit(HypSpec((-n, 1, d, lam + 1), (b + 2, 1 - e + d - n, lam))))
    return make_residual("ex1_thomae", scaled(lhs, pre), acc.report())


# --- r = 1, m = 2, q = 0, second transformation -------------------------------------

def ex3_rhat_explicit(a, b, f, t) -> complex:
    return (2 * b / (a - b) * (1 - (t + 1) * (1 - b) / (2 * (a - b + 1)))
            - 2 * a * b / (f * (a - b)) * (1 + (t + 1) * b / (a - b + 1))
            + pochhammer(a, 2) * pochhammer(b, 2) * (t + 1) / (pochhammer(f, 2) * pochhammer(a - b, 2)))


def ex3_rhat(a, b, f, t) -> Residual:
    return _compare("ex3_rhat", ex3_rhat_explicit(a, b, f, t),
                    rhat_value(a, b, IpdSpec((f,), (2,)), 0, t))


def ex3_root(a, b, f) -> Residual:
    numeric = roots(rhat_poly(a, b, IpdSpec((f,), (2,)), 0)).roots[0]
    return _compare("ex3_root", example3_root(a, b, f), numeric)


def ex3_finite(a, b, f, x) -> Residual:
    x = complex(x)
    g = example3_root(a, b, f)
    lhs = scaled(eval_series(HypSpec((a, b, f + 2), (a + 2, f)), x), (1 - x) ** b)
    coef = x * b * (a * (f + 2) / ((a + 2) * f) - 1)
    acc = Combo().add(1.0)
    acc.add_series(coef, eval_series(HypSpec((1, a - b + 1, g + 2), (a + 3, g + 1)), x))
    return make_residual("ex3_finite", lhs, acc.report())


def ex3_finite_alt(a, b, f, x) -> Residual:
    x = complex(x)
    g = example3_root(a, b, f)
    A = example3_constant_a(a, b, f)
    lhs = scaled(eval_series(HypSpec((a, b, f + 2), (a + 2, f)), x), (1 - x) ** b)
    acc = Combo().add(A)
    acc.add_series(1 - A, eval_series(HypSpec((a - b, 1, g + 1), (a + 2, g)), x))
    return make_residual("ex3_finite_alt", lhs, acc.report())


def ex3_unit(a, b, d, e, f) -> Residual:
    return cor_q0_unit("second", b, d, e, IpdSpec((f,), (2,)), a=a)


def ex3_unit_alt(a, b, d, e, f) -> Residual:
    return cor_q0_unit("second_alt", b, d, e, IpdSpec((f,), (2,)), a=a)


# --- the corpus -------------------------------------------------------------------

def _cases(name, kind, fn, param_sets):
    return [GoldenCase(f"{name}[{i}]", kind, tuple(p), (lambda p=p: fn(*p)))
            for i, p in enumerate(param_sets)]


def corpus() -> list:
    """All golden cases, in a fixed order."""
    out = []
    out += _cases("intro_a", "finite", lambda a, b, f, x: intro_identities(a, b, f, x, "first"),
                  [(0.4, 0.7, 1.6, 0.3), (1.3, -0.4, 2.2, -0.35), (-0.6 + 0.2j, 0.5, 0.8, 0.2 + 0.25j)])
    out += _cases("intro_b", "finite", lambda a, b, f, x: intro_identities(a, b, f, x, "second"),
                  [(0.4, 0.7, 1.6, 0.3), (1.3, -0.4, 2.2, -0.35), (-0.6 + 0.2j, 0.5, 0.8, 0.2 + 0.25j)])
    ex1_bf = [(0.7, 3.0), (1.3, 2.2), (0.25 + 0.2j, 1.6)]
    out += _cases("ex1_root", "root", ex1_root, ex1_bf)
    out += _cases("ex1_r1", "finite", ex1_r1, [(0.7, 3.0, 0.3), (1.3, 2.2, -1.7), (0.25 + 0.2j, 1.6, 2.5j)])
    out += _cases("ex1_finite", "finite", ex1_finite,
                  [(0.4, 0.7, 3.0, 0.3), (-0.8, 1.3, 2.2, -0.4), (1.5, 0.25 + 0.2j, 1.6, 0.2 + 0.3j)])
    out += _cases("ex1_thomae", "finite", ex1_thomae,
                  [(3, 0.7, 0.45, 2.3, 3.0), (5, 1.3, 1.1, 4.5, 2.2), (2, 0.25, 0.6, 1.9, 1.6)])
    out += _cases("ex2_general", "unit", lambda a, b, d, f, e: example2_chain(a, b, d, f, e=e),
                  [(0.37, 0.61, 0.45, 1.7, 5.3), (-0.6, 0.3, 0.8, 2.4, 2.1), (1.2, 0.5, 0.2, 0.9, 1.5)])
    for r in (1, 2, 3):
        out += _cases(f"ex2_e_b{r}", "unit", lambda a, b, d, f, r=r: example2_chain(a, b, d, f, r=r),
                      [(0.37, 0.61, 0.45, 1.7), (-0.6, 0.3, 0.2, 2.4), (1.2, 1.5, 0.1, 0.9)])
    ex3_abf = [(0.37, 0.61, 1.7), (1.4, -0.3, 2.5), (-0.45, 0.8, 0.6)]
    out += _cases("ex3_rhat", "finite", ex3_rhat, [p + (t,) for p, t in zip(ex3_abf, (0.3, -2.2, 1.5))])
    out += _cases("ex3_root", "root", ex3_root, ex3_abf)
    xs = (0.3, -0.35, 0.2 + 0.2j)
    out += _cases("ex3_finite", "finite", ex3_finite, [p + (x,) for p, x in zip(ex3_abf, xs)])
    out += _cases("ex3_finite_alt", "finite", ex3_finite_alt, [p + (x,) for p, x in zip(ex3_abf, xs)])
    de = ((0.45, 5.3), (0.3, 2.2), (0.7, 3.1))
    out += _cases("ex3_unit", "unit", ex3_unit, [(a, b, d, e, f) for (a, b, f), (d, e) in zip(ex3_abf, de)])
    out += _cases("ex3_unit_alt", "unit", ex3_unit_alt,
                  [(a, b, d, e, f) for (a, b, f), (d, e) in zip(ex3_abf, de)])
    ds = (0.45, 0.3, 0.1)
    out += _cases("ex3_sum_b1", "unit", lambda a, b, d, f: example3_sum(a, b, d, f, 1),
                  [(a, b, d, f) for (a, b, f), d in zip(ex3_abf, ds)])
    out += _cases("ex3_sum_b1_3f2", "unit", lambda a, b, d, f: example3_sum(a, b, d, f, 1, closed=False),
                  [(a, b, d, f) for (a, b, f), d in zip(ex3_abf, ds)])
    out += _cases("ex3_sum_b2", "unit", lambda a, b, d, f: example3_sum(a, b, d, f, 2),
                  [(a, b, d, f) for (a, b, f), d in zip(ex3_abf, (0.45, 1.3, 0.7))])
    out += _cases("ex4_4f4", "finite", example4_4f4,
                  [(0.61, 1.3, 2.7, 0.9, 0.3), (1.7, 0.8, 3.1, 1.9, -1.2), (0.35 + 0.1j, 2.2, 1.4, 2.6, 2.0)])
    out += _cases("ex4_6f5", "unit", example4_6f5,
                  [(0.37, 0.61, 0.45, 5.3, 1.3, 2.7, 0.9), (1.2, 0.4, 0.3, 4.1, 0.7, 1.9, 2.3),
                   (-0.3, 0.9, 0.6, 5.0, 1.5, 2.5, 3.5)])
    return out
