import numpy as np
import pytest

from hypid.arith import IpdSpec, gamma_cx, pochhammer
from hypid.charpoly import r_poly
from hypid.errors import ConstraintViolation
from hypid.golden import ex1_thomae, ex3_unit, ex3_unit_alt
from hypid.hyp import HypSpec, eval_unit
from hypid.summation import (beta_method_thm5, cor_q0_unit, example2_chain, example3_sum,
                             example4_6f5, karlsson_general, pfq_unit_reduction, thomae_like_1,
                             thomae_like_2)

SPEC = IpdSpec((1.3, 2.7, 0.9), (1, 2, 1))
A, B = 0.37, 0.61
KARLSSON_ORACLE = 0.4408646284955295  # mpmath, a=-1.5, b=0.7, f=2.3, m=2, q=0

# (f, m, q, b, a) with f_j - b inside the set where R vanishes
VANISHING = [
    ((0.7,), (3,), 1, 1.7, -1.6),
    ((1.3,), (3,), 1, 1.3, -1.9),
    ((0.8,), (2,), 0, 0.8, -0.7),
    ((0.9, 1.4), (1, 3), 2, 2.4, -2.5),
    ((0.6 + 0.2j, 2.3), (2, 2), 3, 1.6 + 0.2j, -3.5 + 0.1j),
]


# --- generalized Karlsson sum ------------------------------------------------------

def test_karlsson_example():
    res = karlsson_general(-1.5, 0.7, IpdSpec((2.3,), (2,)), 0)
    assert res.rel_err <= 1e-6
    assert abs(res.lhs - KARLSSON_ORACLE) < 1e-12


@pytest.mark.parametrize("q", range(4))
def test_karlsson_all_q(q):
    assert karlsson_general(-q - 0.7 + 0.1j, B, SPEC, q).rel_err < 1e-10


def test_karlsson_last_q_shape():
    a, b, f, m = -2.6, 0.45, 2.2, 3
    spec = IpdSpec((f,), (m,))
    closed = (gamma_cx(b + 1) * gamma_cx(1 - a) * pochhammer(f - b, m)
              / (gamma_cx(b - a + 1) * pochhammer(f, m)))
    assert abs(karlsson_general(a, b, spec, m - 1).rhs - closed) < 1e-13
    assert abs(eval_unit(HypSpec((a, b, f + m), (b + 1, f))).value - closed) < 1e-10


@pytest.mark.parametrize("f, m, q, b, a", VANISHING)
def test_karlsson_vanishing(f, m, q, b, a):
    spec = IpdSpec(f, m)
    assert r_poly(b, spec, q).is_zero
    res = karlsson_general(a, b, spec, q)
    assert "zero_reduced_polynomial" in res.flags
    assert abs(res.lhs) <= 1e-7


def test_karlsson_needs_negative_real_part():
    with pytest.raises(ConstraintViolation):
        karlsson_general(0.2, B, SPEC, 0)


# --- terminating transformation ------------------------------------------------------

def test_thomae1_two_term_case():
    n, b, d, e, f, m = 1, 0.4, 0.3, 1.9, 1.7, 2
    spec = IpdSpec((f,), (m,))
    explicit = 1 - b * d * (f + m) / ((b + m) * e * f)
    res = thomae_like_1(n, b, d, e, spec, 0)
    assert abs(res.lhs - explicit) < 1e-15
    assert res.rel_err <= 1e-12


def test_thomae1_tail_missing_when_n_le_q():
    q, n = 2, 2
    res = thomae_like_1(n, B, 0.45, 2.3, SPEC, q)
    assert res.rhs_report.terms_used == 0
    assert res.rel_err < 1e-12


@pytest.mark.parametrize("q", range(4))
@pytest.mark.parametrize("n", [1, 3, 6])
def test_thomae1_terminating(n, q):
    assert thomae_like_1(n, B, 0.45, 2.3 + 0.2j, SPEC, q).rel_err <= 1e-10


def test_thomae1_single_pair_explicit_root():
    assert ex1_thomae(4, 0.7, 0.6, 2.4, 3.0).rel_err <= 1e-10


@pytest.mark.parametrize("q", range(4))
def test_beta_method(q):
    assert beta_method_thm5(5, B, 0.8, 2.9, SPEC, q).rel_err <= 1e-6


def test_beta_method_needs_real_weights():
    with pytest.raises(ConstraintViolation):
        beta_method_thm5(2, B, 0.8 + 0.1j, 2.9, SPEC, 0)


# --- non-terminating transformation ----------------------------------------------------

@pytest.mark.parametrize("q", range(4))
def test_thomae2(q):
    b = -0.4
    d = 0.6
    e = b + d + q + 1.1
    assert thomae_like_2(A, b, d, e, SPEC, q).rel_err <= 1e-10


def test_thomae2_small_d():
    q, b, d = 1, -0.4, 1e-6
    res = thomae_like_2(A, b, d, b + d + q + 1.5, SPEC, q)
    assert abs(res.lhs - 1) < 1e-5
    assert res.rel_err < 1e-10


def test_thomae2_rejects_divergent_parameters():
    with pytest.raises(ConstraintViolation):
        thomae_like_2(A, -0.4, 0.6, -0.4 + 0.6 + 1 - 0.1, SPEC, 1)


def test_six_f_five_case():
    res = example4_6f5(0.45, -0.35, 0.55, 3.9, 1.4, 2.3, 0.8)
    assert res.rel_err <= 1e-6
    general = thomae_like_2(0.45, -0.35, 0.55, 3.9, IpdSpec((1.4, 2.3, 0.8), (1, 1, 2)), 2)
    assert abs(general.rhs - res.rhs) < 1e-10


# --- q = 0 forms ---------------------------------------------------------------------

def test_first_q0_form_matches_parent():
    n, d, e = 4, 0.45, 2.3
    cor = cor_q0_unit("first", B, d, e, SPEC, n=n)
    parent = thomae_like_1(n, B, d, e, SPEC, 0)
    assert cor.rel_err < 1e-12
    scale = pochhammer(e, n) / pochhammer(e - d, n)
    assert abs(cor.lhs - parent.lhs * scale) < 1e-12


@pytest.mark.parametrize("variant", ["second", "second_alt"])
def test_second_q0_forms(variant):
    b, d = -0.4, 0.6
    e = b + d + 1.3
    assert cor_q0_unit(variant, b, d, e, SPEC, a=A).rel_err < 1e-10


def test_second_q0_single_pair_cases():
    assert ex3_unit(0.4, 0.7, 0.5, 2.6, 3.0).rel_err <= 1e-6
    assert ex3_unit_alt(0.4, 0.7, 0.5, 2.6, 3.0).rel_err <= 1e-6


# --- reduction and closed forms ------------------------------------------------------

def test_reduction_r1_is_trivial():
    res = pfq_unit_reduction((0.3, 0.8), (2.4,), 1)
    assert res.rel_err < 1e-13


def test_reduction_random_3f2():
    rng = np.random.default_rng(3)
    for r in (2, 3, 4):
        top = tuple(rng.uniform(-1.2, 1.5, 2) + 0.2j)
        bottom = (rng.uniform(r + 0.5, r + 2.5),)
        assert pfq_unit_reduction(top, bottom, r).rel_err <= 1e-8


def test_reduction_rejects_vanishing_prefactor():
    with pytest.raises(ConstraintViolation):
        pfq_unit_reduction((1.0, 0.4), (3.3,), 3)


@pytest.mark.parametrize("r", [1, 2, 3])
def test_chain_summation_integer_shift(r):
    a, b, f = 0.65, 0.4, 1.8
    d = r - 0.7
    res = example2_chain(a, b, d, f, r=r)
    direct = eval_unit(HypSpec((a, b, d, f + 1), (a + 1, b + r, f))).value
    assert abs(res.rhs - direct) <= 1e-8 * abs(direct)


def test_chain_summation_known_case():
    # e = b + 1: K and the 3F2 collapse to a gamma ratio
    a, b, d, f = 0.65, 0.4, 0.3, 1.8
    res = example2_chain(a, b, d, f, r=1)
    k = b * (a - f) / ((a - b) * f)
    pre = gamma_cx(b + 1) * gamma_cx(1 - d) / gamma_cx(b - d + 1)
    closed = pre * (1 - k + k * gamma_cx(a + 1) * gamma_cx(b - d + 1)
                    / (gamma_cx(b + 1) * gamma_cx(a - d + 1)))
    assert abs(res.rhs - closed) < 1e-12
    assert res.rel_err < 1e-10


def test_chain_summation_general():
    res = example2_chain(0.65, 0.4, 0.3, 1.8, e=2.2 + 0.1j)
    assert res.rel_err < 1e-10


@pytest.mark.parametrize("r", [1, 2])
def test_integer_shift_sums(r):
    a, b, f = 0.4, 0.7, 3.0
    d = 0.3 if r == 1 else 1.35
    assert example3_sum(a, b, d, f, r).rel_err <= 1e-8
    if r == 1:
        assert example3_sum(a, b, d, f, r, closed=False).rel_err <= 1e-8


def test_closed_forms_need_convergence():
    with pytest.raises(ConstraintViolation):
        example3_sum(0.4, 0.7, 1.2, 3.0, 1)
    with pytest.raises(ConstraintViolation):
        example2_chain(0.4, 0.7, 1.2, 3.0, r=1)
    with pytest.raises(ValueError):
        example2_chain(0.4, 0.7, 0.3, 3.0)
