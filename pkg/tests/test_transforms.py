import numpy as np
import pytest

from hypid.arith import IpdSpec
from hypid.errors import ConstraintViolation
from hypid.golden import ex1_finite, ex3_finite, ex3_finite_alt
from hypid.hyp import HypSpec, eval_ipd_lhs, eval_series
from hypid.summation import example4_4f4
from hypid.transforms import (IDENTITY_IDS, IdentityCase, cor_q0, cor_qm1, cor_qm2,
                              intro_identities, limit_m1, mp_first, mp_kummer, mp_second,
                              thm1_degenerate, thm2_degenerate_kummer, thm3_degenerate)

SPEC = IpdSpec((1.3, 2.7, 0.9), (1, 2, 1))
A, B = 0.37, 0.61
X = 0.3 + 0.12j


# --- classical transformations -------------------------------------------------------

def test_mp_at_zero():
    spec = IpdSpec((2,), (1,))
    for res in (mp_first(0.3, 0.6, 3.1, spec, 0), mp_kummer(0.6, 3.1, spec, 0),
                mp_second(0.3, 0.6, 4.2, spec, 0)):
        assert res.lhs == 1 and abs(res.rhs - 1) < 1e-15


def test_mp_first_terminating():
    assert mp_first(-2, 0.6, 3.1, IpdSpec((2,), (1,)), 0.4).rel_err <= 1e-10


def test_mp_first_negative_argument():
    assert mp_first(A, B, 5.2, SPEC, -0.3).rel_err <= 1e-8


def test_mp_kummer_examples():
    spec = IpdSpec((2,), (1,))
    assert mp_kummer(0.6, 3.1, spec, 2.5).rel_err <= 1e-9
    res = mp_kummer(0.6, 3.1, spec, -5.0)
    assert res.rel_err <= 1e-6
    assert "cancellation" in res.flags
    assert "cancellation" not in mp_kummer(0.6, 3.1, spec, 0.3).flags


def test_mp_second_example_and_transitivity():
    spec = IpdSpec((2,), (1,))
    assert mp_second(0.3, 0.6, 4.2, spec, 0.35).rel_err <= 1e-8
    for x in (0.35, -0.2 + 0.3j):
        r1 = mp_first(A, B, 5.2, SPEC, x).rhs
        r3 = mp_second(A, B, 5.2, SPEC, x).rhs
        assert abs(r1 - r3) <= 1e-8 * abs(r1)


def test_mp_rejects_degenerate_c():
    with pytest.raises(ConstraintViolation):
        mp_first(A, B, B + 2, SPEC, 0.2)


# --- degenerate theorems ---------------------------------------------------------

@pytest.mark.parametrize("q", range(4))
def test_degenerate_theorems_at_zero(q):
    for res in (thm1_degenerate(A, B, SPEC, q, 0), thm2_degenerate_kummer(B, SPEC, q, 0),
                thm3_degenerate(A, B, SPEC, q, 0)):
        assert abs(res.lhs - 1) < 1e-15 and abs(res.rhs - 1) < 1e-13


@pytest.mark.parametrize("q", range(4))
def test_degenerate_theorems_random_point(q):
    assert thm1_degenerate(A, B, SPEC, q, X).rel_err < 1e-12
    assert thm2_degenerate_kummer(B, SPEC, q, X).rel_err < 1e-12
    assert thm3_degenerate(A, B, SPEC, q, X).rel_err < 1e-12


def test_thm1_single_pair_example():
    b, f, a, x = 0.7, 3.0, 0.4, 0.3
    assert thm1_degenerate(a, b, IpdSpec((f,), (2,)), 0, x).rel_err <= 1e-8
    # the same case written with the explicit root
    assert ex1_finite(a, b, f, x).rel_err <= 1e-8


def test_degenerate_lhs_is_limit_of_classical_lhs():
    eps = 1e-6
    for q in range(SPEC.m_total):
        c = B + SPEC.m_total - q
        lhs = thm1_degenerate(A, B, SPEC, q, X).lhs
        near = eval_ipd_lhs(A, B, c + eps, SPEC, X).value * (1 - X) ** A
        assert abs(lhs - near) < 1e-5


@pytest.mark.parametrize("n", range(1, 7))
def test_terminating_closure(n):
    for q in range(SPEC.m_total):
        assert thm1_degenerate(-n, B, SPEC, q, X).rel_err <= 1e-12
        assert thm3_degenerate(A, -n, SPEC, q, X).rel_err <= 1e-12


def test_thm2_confluence():
    q, x, big = 1, 0.3, 1e4
    target = thm2_degenerate_kummer(B, SPEC, q, x).rhs
    near = thm1_degenerate(big, B, SPEC, q, x / big).rhs
    assert abs(near - target) <= 1e-3 * abs(target)


def test_thm2_reproduces_4f4_case():
    b, f1, f2, f3, x = 0.45, 1.7, 2.6, 3.1, 0.8 - 0.3j
    explicit = example4_4f4(b, f1, f2, f3, x)
    assert explicit.rel_err < 1e-12
    general = thm2_degenerate_kummer(b, IpdSpec((f1, f2, f3), (1, 1, 2)), 2, x)
    assert abs(general.lhs - explicit.lhs) < 1e-12
    assert abs(general.rhs - explicit.rhs) < 1e-12


def test_thm3_single_pair_example():
    a, b, f, x = 0.4, 0.7, 3.0, 0.3
    general = thm3_degenerate(a, b, IpdSpec((f,), (2,)), 0, x)
    for explicit in (ex3_finite(a, b, f, x), ex3_finite_alt(a, b, f, x)):
        assert explicit.rel_err < 1e-12
        assert abs(general.rhs - explicit.rhs) < 1e-12


# --- specializations ---------------------------------------------------------------

def _rhs_close(u, v):
    return abs(u.rhs - v.rhs) <= 1e-10 * max(abs(u.rhs), 1)


def test_specialization_chains():
    m = SPEC.m_total
    pairs = [
        (thm1_degenerate(A, B, SPEC, 0, X), cor_q0(B, SPEC, X, a=A, variant="first")),
        (thm1_degenerate(A, B, SPEC, m - 1, X), cor_qm1(B, SPEC, X, a=A, variant="first")),
        (thm1_degenerate(A, B, SPEC, m - 2, X), cor_qm2(B, SPEC, X, a=A, variant="first")),
        (thm2_degenerate_kummer(B, SPEC, 0, X), cor_q0(B, SPEC, X, variant="kummer")),
        (thm2_degenerate_kummer(B, SPEC, m - 1, X), cor_qm1(B, SPEC, X, variant="kummer")),
        (thm2_degenerate_kummer(B, SPEC, m - 2, X), cor_qm2(B, SPEC, X, variant="kummer")),
        (thm3_degenerate(A, B, SPEC, 0, X), cor_q0(B, SPEC, X, a=A, variant="second")),
        (thm3_degenerate(A, B, SPEC, m - 1, X), cor_qm1(B, SPEC, X, a=A, variant="second")),
        (thm3_degenerate(A, B, SPEC, m - 2, X), cor_qm2(B, SPEC, X, a=A, variant="second")),
    ]
    for general, special in pairs:
        assert _rhs_close(general, special), (general.identity_id, special.identity_id)


def test_second_variant_with_constant():
    plain = cor_q0(B, SPEC, X, a=A, variant="second")
    alt = cor_q0(B, SPEC, X, a=A, variant="second_alt")
    assert abs(plain.rhs - alt.rhs) < 1e-12 and alt.rel_err < 1e-12


def test_penultimate_root_closed_form():
    res = cor_qm2(B, SPEC, X, a=A, variant="first")
    assert abs(res.extras["root"] - res.extras["root_numeric"]) < 1e-9
    res = cor_qm2(B, SPEC, X, a=A, variant="second")
    assert abs(res.extras["root"] - res.extras["root_numeric"]) < 1e-9


def test_last_q_single_pair_is_intro_identity():
    a, b, f, x = 0.4, 0.7, 1.6, 0.3
    spec = IpdSpec((f,), (1,))
    cor = cor_qm1(b, spec, x, a=a, variant="second")
    intro = intro_identities(a, b, f, x, "first")
    assert abs(cor.lhs - intro.lhs) < 1e-13
    assert abs(cor.rhs - intro.rhs) < 1e-12


# --- warm-up identities ----------------------------------------------------------------

def test_limit_formula():
    inner = eval_series(HypSpec((1, 1), (2,)), 0.3).value
    res = limit_m1(1e-6, 2.0, (1, 1), (2,), 0.3)
    assert abs(res.lhs - (1 - 0.5 + 0.5 * inner)) < 1e-5


def test_intro_identities():
    a, b, f, x = 0.4, 0.7, 1.6, 0.3
    first = intro_identities(a, b, f, x, "first")
    second = intro_identities(a, b, f, x, "second")
    assert first.rel_err <= 1e-9 and second.rel_err <= 1e-9
    # the two right sides are Euler-Pfaff images of each other
    assert abs(first.rhs - second.rhs) < 1e-12
    assert first.extras["limit_rel_err"] < 1e-5


# --- dispatch ---------------------------------------------------------------------------

def test_identity_case_dispatch():
    case = IdentityCase("THM1", {"a": A, "b": B, "q": 1}, SPEC, X)
    assert case.residual().rel_err < 1e-12
    assert case.lhs() == thm1_degenerate(A, B, SPEC, 1, X).lhs


def test_identity_case_rejects_violations():
    with pytest.raises(ConstraintViolation):
        IdentityCase("THM1", {"a": A, "b": 1.3, "q": 3}, SPEC, X)
    with pytest.raises(ConstraintViolation):
        IdentityCase("THM3", {"a": A, "b": A - 1, "q": 1}, SPEC, X)
    with pytest.raises(ValueError):
        IdentityCase("NOPE", {}, SPEC, X)


def test_catalog_is_complete():
    assert len(IDENTITY_IDS) == len(set(IDENTITY_IDS)) == 19


def test_x_over_x_minus_one_stays_inside_disk():
    for x in 0.45 * np.exp(1j * np.linspace(-np.pi, np.pi, 73)):
        assert abs(x / (x - 1)) < 0.82
