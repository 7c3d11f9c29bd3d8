"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""
import time

import numpy as np
import pytest

from hypid.arith import IpdSpec, pochhammer_ipd, sigma_coeffs
from hypid.charpoly import (ckr_series, ckr_stirling, lemma_limit_study, r_at, r_poly,
                            r_poly_shifted, r_poly_sum, rhat_at, rhat_poly)
from hypid.errors import ConstraintViolation, HypidError
from hypid.golden import ROOT_TOL, corpus
from hypid.harness import (Box, RunConfig, _Reject, run_check, sample_cases,
                           sample_limit_cases)
from hypid.summation import beta_method_thm5, karlsson_general
from hypid.transforms import (cor_q0, cor_qm1, cor_qm2, thm1_degenerate, thm2_degenerate_kummer,
                              thm3_degenerate)

SEED = 0

# f_j - b inside the set where R vanishes; the LHS must then vanish too
VANISHING = [
    ((0.7,), (3,), 1, 1.7, -1.6),
    ((1.3,), (3,), 1, 1.3, -1.9),
    ((0.8,), (2,), 0, 0.8, -0.7),
    ((0.9, 1.4), (1, 3), 2, 2.4, -2.5),
    ((0.6 + 0.2j, 2.3), (2, 2), 3, 1.6 + 0.2j, -3.5 + 0.1j),
]


@pytest.fixture
def verdict(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n[acceptance {number}] {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail
    return emit


def _all_pass(report):
    s = report.summary
    return s["fail"] == 0 and s["skipped"] == 0 and s["pass"] == s["count"]


def test_criterion_1_classical(verdict):
    cfg = RunConfig(seed=SEED, draws=200, identities=("MP1", "MP2", "MP3"))
    start = time.process_time()
    report = run_check(cfg)
    elapsed = time.process_time() - start
    s = report.summary
    ok = _all_pass(report) and s["median_rel_err"] <= 1e-9 and elapsed <= 60
    verdict(1, ok, f"{s['pass']}/{s['count']} pass, median rel_err {s['median_rel_err']:.2e}, "
                   f"max {s['max_rel_err']:.2e}, {elapsed:.1f} s CPU")


def test_criterion_2_degenerate(verdict):
    cfg = RunConfig(seed=SEED, draws=200, identities=("THM1", "THM2", "THM3"))
    report = run_check(cfg)
    s = report.summary
    covered = all(
        {r["params"]["q"] for r in report.records if r["identity_id"] == ident}
        == set(range(5)) for ident in cfg.identities)
    ok = _all_pass(report) and covered
    verdict(2, ok, f"{s['pass']}/{s['count']} pass, max rel_err {s['max_rel_err']:.2e}, "
                   f"every q in 0..4 drawn: {covered}")


def _coherence_pairs(a, b, spec, x):
    m = spec.m_total
    return [
        (thm1_degenerate(a, b, spec, 0, x), cor_q0(b, spec, x, a=a, variant="first")),
        (thm1_degenerate(a, b, spec, m - 1, x), cor_qm1(b, spec, x, a=a, variant="first")),
        (thm1_degenerate(a, b, spec, m - 2, x), cor_qm2(b, spec, x, a=a, variant="first")),
        (thm2_degenerate_kummer(b, spec, 0, x), cor_q0(b, spec, x, variant="kummer")),
        (thm2_degenerate_kummer(b, spec, m - 1, x), cor_qm1(b, spec, x, variant="kummer")),
        (thm2_degenerate_kummer(b, spec, m - 2, x), cor_qm2(b, spec, x, variant="kummer")),
        (thm3_degenerate(a, b, spec, 0, x), cor_q0(b, spec, x, a=a, variant="second")),
        (thm3_degenerate(a, b, spec, m - 1, x), cor_qm1(b, spec, x, a=a, variant="second")),
        (thm3_degenerate(a, b, spec, m - 2, x), cor_qm2(b, spec, x, a=a, variant="second")),
    ]


def _shared_draw(box):
    spec = box.spec(m_min=2)
    m = spec.m_total
    a, b, x = box.cx(-1.5, 2.5), box.cx(-0.8, 2.5), box.x()
    for q in (0, m - 2, m - 1):
        box.roots_far(r_poly(b, spec, q))
        box.roots_far(rhat_poly(a, b, spec, q))
    return a, b, spec, x


def test_criterion_3_coherence(verdict):
    box = Box(np.random.default_rng(np.random.SeedSequence(SEED, spawn_key=(101,))), RunConfig())
    worst, draws, rejected = 0.0, 0, 0
    while draws < 50:
        try:
            a, b, spec, x = _shared_draw(box)
            pairs = _coherence_pairs(a, b, spec, x)
        except (HypidError, _Reject):  # guard band or a violated hypothesis
            rejected += 1
            continue
        draws += 1
        for general, special in pairs:
            for u, v in ((general.lhs, special.lhs), (general.rhs, special.rhs)):
                worst = max(worst, abs(u - v) / max(abs(u), abs(v), 1e-300))
    verdict(3, worst <= 1e-10, f"50 shared draws x 9 pairs, worst relative gap {worst:.2e} "
                               f"({rejected} draws resampled)")


EPS = (1e-4, 1e-5, 1e-6)


def test_criterion_4_limit_studies(verdict):
    worst_err, worst_slope, worst_ratio = 0.0, 0.0, 0.0
    for lemma in (1, 2):
        for case in sample_limit_cases(SEED, 10, lemma):
            st = lemma_limit_study(case["spec"], case["q"], case["b"], case.get("a"), eps_list=EPS)
            worst_err = max(worst_err, st.rows[1].max_error)
            worst_slope = max(worst_slope, abs(st.slope - 1))
            worst_ratio = max(worst_ratio, st.ratio_rel_err)
    ok = worst_err <= 1e-3 and worst_slope <= 0.2 and worst_ratio <= 0.01
    verdict(4, ok, f"20 studies, max error at eps=1e-5 {worst_err:.2e}, "
                   f"max |slope-1| {worst_slope:.3f}, max ratio rel_err {worst_ratio:.2e}")


def test_criterion_5_karlsson(verdict):
    report = run_check(RunConfig(seed=SEED, draws=50, identities=("THM4",)))
    a_ok = all(r["params"]["a"][0] + r["params"]["q"] <= -0.4 for r in report.records)
    worst_zero = 0.0
    for f, m, q, b, a in VANISHING:
        worst_zero = max(worst_zero, abs(karlsson_general(a, b, IpdSpec(f, m), q).lhs))
    s = report.summary
    ok = _all_pass(report) and a_ok and worst_zero <= 1e-7
    verdict(5, ok, f"{s['pass']}/{s['count']} pass, max rel_err {s['max_rel_err']:.2e}; "
                   f"5 vanishing cases, max |LHS| {worst_zero:.1e}")


def _beta_cases(count):
    box = Box(np.random.default_rng(np.random.SeedSequence(SEED, spawn_key=(102,))), RunConfig())
    out = []
    while len(out) < count:
        spec = box.spec()
        q = box.integer(0, spec.m_total - 1)
        n, b = box.integer(1, 6), box.cx(-0.8, 2.5)
        d = box.uniform(0.3, 2.0)
        e = d + box.uniform(0.5, 2.0)
        try:
            out.append(beta_method_thm5(n, b, d, e, spec, q))
        except ConstraintViolation:
            continue
    return out


def test_criterion_6_terminating_and_unit(verdict):
    thm5 = run_check(RunConfig(seed=SEED, draws=100, rel_tol=1e-10, identities=("THM5",)))
    thm6 = run_check(RunConfig(seed=SEED, draws=50, rel_tol=1e-6, identities=("THM6",)))
    beta = max(r.rel_err for r in _beta_cases(10))
    ok = _all_pass(thm5) and _all_pass(thm6) and beta <= 1e-6
    verdict(6, ok, f"THM5 {thm5.summary['pass']}/100 at 1e-10 (max {thm5.summary['max_rel_err']:.1e}), "
                   f"THM6 {thm6.summary['pass']}/50 at 1e-6 (max {thm6.summary['max_rel_err']:.1e}), "
                   f"beta method max rel_err {beta:.1e}")


def test_criterion_7_golden(verdict):
    cases = corpus()
    results = [(c, c.run()) for c in cases]
    failed = [c.name for c, r in results if not r.passed(c.tol)]
    roots = [r.rel_err for c, r in results if c.kind == "root"]
    ok = not failed and len(roots) == 6 and max(roots) <= ROOT_TOL
    verdict(7, ok, f"{len(cases) - len(failed)}/{len(cases)} golden cases pass, "
                   f"{len(roots)} closed-form roots, max rel_err {max(roots):.1e}")


def _fuzz_corpus():
    cfg = RunConfig(seed=SEED)
    for ident in ("THM1", "THM3", "COR2", "COR6"):
        for case in sample_cases(ident, cfg):
            if case is not None:
                params, spec, _ = case
                yield params["b"], params.get("a", 0.5 + 0.1j), spec


def test_criterion_8_dual_forms(verdict):
    worst_c, worst_r, worst_at, worst_sigma, n = 0.0, 0.0, 0.0, 0.0, 0
    rng = np.random.default_rng(np.random.SeedSequence(SEED, spawn_key=(103,)))
    for b, a, spec in _fuzz_corpus():
        n += 1
        for k in range(spec.m_total + 1):
            u, v = ckr_stirling(k, spec), ckr_series(k, spec)
            worst_c = max(worst_c, abs(u - v) / max(abs(u), 1.0))
        for q in range(spec.m_total):
            p1, p2 = r_poly_sum(b, spec, q), r_poly_shifted(b, spec, q)
            scale = max(np.max(np.abs(p1.coeffs)), 1e-300)
            worst_r = max(worst_r, float(np.max(np.abs(p1.coeffs - p2.coeffs))) / scale)
            for closed, poly in ((r_at(b, spec, q), p1), (rhat_at(a, b, spec, q),
                                                          rhat_poly(a, b, spec, q))):
                horner = poly(-q - 1)
                worst_at = max(worst_at, abs(closed - horner) / max(abs(horner), poly.scale))
        sig = sigma_coeffs(spec)
        for x in rng.uniform(-3, 3, 5) + 1j * rng.uniform(-3, 3, 5):
            direct = sum(s * x ** j for j, s in enumerate(sig))
            size = sum(abs(s) * abs(x) ** j for j, s in enumerate(sig))
            worst_sigma = max(worst_sigma, abs(direct - pochhammer_ipd(spec, x)) / size)
    ok = max(worst_c, worst_r, worst_at) <= 1e-10 and worst_sigma <= 1e-12
    verdict(8, ok, f"{n} fuzz specs: C_kr {worst_c:.1e}, R forms {worst_r:.1e}, "
                   f"closed values vs Horner {worst_at:.1e}, sigma round trip {worst_sigma:.1e}")
