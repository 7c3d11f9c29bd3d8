"""Random case generation and batch identity checking.

Every identity in :data:`CATALOG` has a sampler drawing admissible
parameters uniformly from fixed boxes.  Draws closer than ``guard_band`` to
an excluded value (including roots of the characteristic polynomials that
become bottom parameters) are rejected and redrawn, at most
:data:`MAX_RESAMPLES` times; a case that never lands is reported as
skipped.

Streams are split per identity: identity ``k`` of :data:`CATALOG` draws from
``numpy.random.default_rng(SeedSequence(seed, spawn_key=(k,)))`` (PCG64), so
adding or removing identities from a run never changes the draws of the
others.
"""

from __future__ import annotations

import dataclasses
import json
import math
import statistics
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .arith import IpdSpec, distance_to_set
from .charpoly import qm_poly, qmhat_poly, r_poly, rhat_poly, root_list
from .errors import ConstraintViolation, HypidError
from .hyp import term_cap
from .summation import (UNIT_IDS, cor_q0_unit, example2_chain, example3_root, example3_sum,
                        example4_6f5, karlsson_general, pfq_unit_reduction, thomae_like_1,
                        thomae_like_2)
from .transforms import IDENTITY_IDS, Residual, check_constraints, evaluate

CATALOG = IDENTITY_IDS + UNIT_IDS
MAX_RESAMPLES = 100
LIMIT_EPS = 1e-8
IM_BOX = 0.25
NONPOS_DEPTH = 64


@dataclass
class RunConfig:
    """Settings of a batch check.

    Parameters
    ----------
    seed : int
        Root seed of the per-identity streams.
    draws : int
        Cases per identity.
    r_max, m_total_max : int
        Bounds on the number of IPD pairs and on ``sum(m)``.
    x_box : float
        Radius of the disk from which finite arguments are drawn.
    guard_band : float
        Minimum distance from excluded parameter values.
    rel_tol : float
        Pass threshold on the relative error.
    term_cap : int
        Series term cap (``HYPID_TERM_CAP`` takes precedence).
    identities : tuple of str
        Identity ids to run.
    """

    seed: int = 0
    draws: int = 50
    r_max: int = 3
    m_total_max: int = 5
    x_box: float = 0.45
    guard_band: float = 0.05
    rel_tol: float = 1e-6
    term_cap: int = 1_000_000
    identities: tuple = CATALOG

    def __post_init__(self):
        self.identities = tuple(self.identities)
        if self.draws < 1:
            raise ValueError("draws must be >= 1")
        if not 0 < self.x_box < 0.5:
            raise ValueError("x_box must lie in (0, 0.5)")
        if self.guard_band <= 0:
            raise ValueError("guard_band must be positive")
        if self.rel_tol <= 0:
            raise ValueError("rel_tol must be positive")
        if self.r_max < 1 or self.m_total_max < 1:
            raise ValueError("r_max and m_total_max must be >= 1")
        if self.term_cap < 1:
            raise ValueError("term_cap must be positive")
        unknown = [i for i in self.identities if i not in CATALOG]
        if unknown:
            raise ValueError(f"unknown identities: {', '.join(unknown)}")
        if not self.identities:
            raise ValueError("no identities selected")


class _Reject(Exception):
    """A draw fell inside a guard band."""


class Box:
    """Uniform draws with guard-band rejection."""

    def __init__(self, rng: np.random.Generator, cfg: RunConfig):
        self.rng = rng
        self.cfg = cfg

    def uniform(self, lo: float, hi: float) -> float:
        return float(self.rng.uniform(lo, hi))

    def cx(self, lo: float, hi: float, im: float = IM_BOX) -> complex:
        return complex(self.uniform(lo, hi), self.uniform(-im, im))

    def integer(self, lo: int, hi: int) -> int:
        """Uniform integer in ``lo..hi`` inclusive."""
        return int(self.rng.integers(lo, hi + 1))

    def spec(self, m_min: int = 1) -> IpdSpec:
        m_total = self.integer(max(1, m_min), self.cfg.m_total_max)
        r = self.integer(1, min(self.cfg.r_max, m_total))
        cuts = sorted(self.rng.choice(np.arange(1, m_total), r - 1, replace=False).tolist())
        m = np.diff([0] + cuts + [m_total]).tolist()
        f = [self.uniform(0.5, 3.5) for _ in range(r)]
        return IpdSpec(tuple(f), tuple(int(v) for v in m))

    def x(self) -> complex:
        rad = self.cfg.x_box * math.sqrt(self.uniform(0.0, 1.0))
        return complex(np.exp(1j * self.uniform(-math.pi, math.pi)) * rad)

    def far(self, value, ints, what: str = "") -> None:
        ints = list(ints)
        if ints and distance_to_set(complex(value), ints) < self.cfg.guard_band:
            raise _Reject(what)

    def far_nonpos(self, value, what: str = "") -> None:
        self.far(value, range(-NONPOS_DEPTH, 1), what)

    def roots_far(self, poly) -> None:
        # roots reappear as bottom parameters, possibly shifted up by an integer
        for z in root_list(poly):
            self.far_nonpos(z, "root")


# --- samplers -----------------------------------------------------------------
# Each returns ``(params, spec, x)``; ``params`` keys follow the evaluators.

def _exclusion(box: Box, u, spec: IpdSpec, q: int) -> None:
    m = spec.m_total
    for fj, mj in zip(spec.f, spec.m):
        lo = m - q - mj
        if lo <= 0:
            box.far(fj - u, range(lo, 1), "f_j - u")


def _s_mp(box: Box, ident: str):
    spec = box.spec()
    m = spec.m_total
    a = box.cx(-1.5, 2.5)
    b = box.cx(0.2, 2.5)
    c = b + box.cx(0.2, m + 2.0, 0.1)
    box.far_nonpos(c)
    box.far(c - b, range(1, m + 1))
    if ident == "MP3":
        box.far(c - a, range(1, m + 1))
        box.far(c - a - b, range(1, m + 1))
        box.roots_far(qmhat_poly(a, b, c, spec))
    else:
        box.roots_far(qm_poly(b, c, spec))
    params = {"b": b, "c": c} if ident == "MP2" else {"a": a, "b": b, "c": c}
    return params, spec, box.x()


def _q_for(box: Box, ident: str, spec: IpdSpec) -> int:
    m = spec.m_total
    if ident.startswith("COR1") or ident.startswith("COR2"):
        return 0
    if ident.startswith("COR3") or ident == "COR4":
        return m - 1
    if ident.startswith("COR5") or ident == "COR6":
        return m - 2
    return box.integer(0, m - 1)


def _s_first(box: Box, ident: str):
    """THM1, THM2 and the corollaries built on ``R``."""
    spec = box.spec(m_min=2 if ident.startswith("COR5") else 1)
    m = spec.m_total
    q = _q_for(box, ident, spec)
    b = box.cx(-0.8, 2.5)
    box.far_nonpos(b + m - q)
    _exclusion(box, b, spec, q)
    box.roots_far(r_poly(b, spec, q))
    params = {"b": b}
    if ident not in ("THM2", "COR1b", "COR3b", "COR5b"):
        params["a"] = box.cx(-1.5, 2.5)
    if ident.startswith("THM"):
        params["q"] = q
    return params, spec, box.x()


def _s_second(box: Box, ident: str):
    """THM3 and the corollaries built on ``R^``."""
    spec = box.spec(m_min=2 if ident == "COR6" else 1)
    m = spec.m_total
    q = _q_for(box, ident, spec)
    a = box.cx(-0.8, 2.5)
    b = box.cx(-1.5, 2.5)
    box.far_nonpos(a + m - q)
    box.far(a - b, range(q + 1 - m, q + 1))
    _exclusion(box, a, spec, q)
    box.roots_far(rhat_poly(a, b, spec, q))
    params = {"a": a, "b": b}
    if ident == "THM3":
        params["q"] = q
    return params, spec, box.x()


def _s_intro(box: Box, ident: str):
    a = box.cx(-0.5, 2.5)
    b = box.cx(-1.5, 2.5)
    f = box.uniform(0.5, 3.5)
    box.far_nonpos(a + 1)
    if ident == "INTRO_A":
        box.far(a - b, [0])
    return {"a": a, "b": b, "f": f}, None, box.x()


def _s_limit(box: Box, ident: str):
    bottom = (box.cx(0.5, 3.0),)
    box.far_nonpos(bottom[0])
    params = {"eps": LIMIT_EPS, "alpha": box.cx(0.5, 3.0), "top": (box.cx(-1.5, 2.5), box.cx(-1.5, 2.5)),
              "bottom": bottom}
    return params, None, box.x()


def _s_karlsson(box: Box, ident: str):
    spec = box.spec()
    m = spec.m_total
    q = box.integer(0, m - 1)
    b = box.cx(0.2, 2.5)
    a = complex(-q - box.uniform(0.4, 2.0), box.uniform(-IM_BOX, IM_BOX))
    return {"a": a, "b": b, "q": q}, spec, None


def _s_thm5(box: Box, ident: str):
    spec = box.spec()
    m = spec.m_total
    q = 0 if ident == "COR7a" else box.integer(0, m - 1)
    n = box.integer(1, 8)
    b = box.cx(-0.8, 2.5)
    d = box.cx(0.2, 2.5)
    e = box.cx(0.5, 4.0)
    box.far_nonpos(b + m - q)
    _exclusion(box, b, spec, q)
    box.roots_far(r_poly(b, spec, q))
    box.far_nonpos(e)
    box.far(d - e, range(-NONPOS_DEPTH, NONPOS_DEPTH))
    params = {"n": n, "b": b, "d": d, "e": e}
    if ident == "THM5":
        params["q"] = q
    return params, spec, None


def _s_thm6(box: Box, ident: str, spec: Optional[IpdSpec] = None, q: Optional[int] = None):
    spec = spec or box.spec()
    m = spec.m_total
    if q is None:
        q = 0 if ident == "COR7b" else box.integer(0, m - 1)
    a = box.cx(-0.8, 2.5)
    b = box.cx(-1.5, 2.5)
    d = box.cx(0.2, 1.5)
    e = b + d + q + box.cx(0.4, 2.5, 0.1)
    box.far_nonpos(a + m - q)
    box.far(a - b, range(q + 1 - m, q + 1))
    _exclusion(box, a, spec, q)
    box.roots_far(rhat_poly(a, b, spec, q))
    box.far_nonpos(e)
    if (e - d).real < 0.4:
        raise _Reject("e - d")
    params = {"a": a, "b": b, "d": d, "e": e}
    if ident == "THM6":
        params["q"] = q
    return params, spec, None


def _s_cor7b(box: Box, ident: str, index: int = 0):
    params, spec, x = _s_thm6(box, ident)
    params["variant"] = "second" if index % 2 == 0 else "second_alt"
    return params, spec, x


def _s_reduction(box: Box, ident: str):
    p = box.integer(1, 3)
    nb = box.integer(p - 1, p)
    r = box.integer(1, 4)
    top = tuple(box.cx(-1.5, 2.5) for _ in range(p))
    bottom = tuple(box.cx(0.5, 4.0) for _ in range(nb))
    for t in top:
        box.far(t, range(1, r))
    for t in bottom:
        box.far_nonpos(t - r + 1)
    if p == nb + 1 and (sum(bottom) + r - sum(top) - 1).real < 0.4:
        raise _Reject("excess")
    return {"top": top, "bottom": bottom, "r": r}, None, None


def _s_ex2(box: Box, ident: str, index: int = 0):
    a = box.cx(-0.8, 2.5)
    b = box.cx(0.2, 2.5)
    f = box.uniform(0.5, 3.5)
    box.far_nonpos(a + 1)
    box.far(a - b, [0])
    if index % 2 == 0:
        d = box.cx(0.1, 1.5)
        e = b + d + box.cx(0.4, 2.5, 0.1)
        box.far_nonpos(e)
        return {"a": a, "b": b, "d": d, "f": f, "e": e}, None, None
    r = 1 + (index // 2) % 3
    d = box.cx(0.1, r - 0.4, 0.1)
    box.far(a - b, range(0, r))
    box.far(d, range(1, r))
    box.far_nonpos(a - r + 2)
    box.far_nonpos(b - d + r)
    return {"a": a, "b": b, "d": d, "f": f, "r": r}, None, None


def _s_ex3(box: Box, ident: str, index: int = 0):
    r = 1 + index % 2
    a = box.cx(-0.8, 2.5)
    b = box.cx(0.2, 2.5)
    f = box.uniform(0.5, 3.5)
    d = box.cx(0.1, r - 0.4, 0.1)
    box.far_nonpos(a + 1)
    box.far(a - b, [-1, 0, 1])
    box.far(f - a, [-1, 0])
    box.far(d - b, [1, 2])
    box.far(d, [1])
    box.far_nonpos(b - d + 2)
    lam = example3_root(a, b, f)
    box.far(lam, range(-NONPOS_DEPTH, 2))
    return {"a": a, "b": b, "d": d, "f": f, "r": r}, None, None


def _s_ex4(box: Box, ident: str):
    spec = IpdSpec(tuple(box.uniform(0.5, 3.5) for _ in range(3)), (1, 1, 2))
    params, _, _ = _s_thm6(box, "THM6", spec=spec, q=2)
    del params["q"]
    params.update({"f1": spec.f[0], "f2": spec.f[1], "f3": spec.f[2]})
    return params, None, None


_INDEXED = {"COR7b": _s_cor7b, "EX2": _s_ex2, "EX3_SUM": _s_ex3}

SAMPLERS: dict = {
    **{i: _s_mp for i in ("MP1", "MP2", "MP3")},
    **{i: _s_first for i in ("THM1", "THM2", "COR1a", "COR1b", "COR3a", "COR3b", "COR5a", "COR5b")},
    **{i: _s_second for i in ("THM3", "COR2", "COR2alt", "COR4", "COR6")},
    "INTRO_A": _s_intro, "INTRO_B": _s_intro, "LIMIT_M1": _s_limit,
    "THM4": _s_karlsson, "THM5": _s_thm5, "COR7a": _s_thm5, "THM6": _s_thm6,
    "RED_LEMMA": _s_reduction, "EX4": _s_ex4,
    **_INDEXED,
}


def identity_rng(seed: int, identity_id: str) -> np.random.Generator:
    """The independent stream of one catalog identity."""
    k = CATALOG.index(identity_id)
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(k,)))


def sample_cases(identity_id: str, cfg: RunConfig) -> list:
    """Draw ``cfg.draws`` cases; a case is ``(params, spec, x)`` or ``None`` when skipped."""
    box = Box(identity_rng(cfg.seed, identity_id), cfg)
    sampler = SAMPLERS[identity_id]
    out = []
    for index in range(cfg.draws):
        case = None
        for _ in range(MAX_RESAMPLES):
            try:
                if identity_id in _INDEXED:
                    case = sampler(box, identity_id, index)
                else:
                    case = sampler(box, identity_id)
                break
            except (_Reject, HypidError):
                continue
        out.append(case)
    return out


# --- evaluation -----------------------------------------------------------------

def evaluate_unit(identity_id: str, p: dict, spec: Optional[IpdSpec]) -> Residual:
    """Evaluate a unit-argument identity by id."""
    table: dict = {
        "THM4": lambda: karlsson_general(p["a"], p["b"], spec, p["q"]),
        "THM5": lambda: thomae_like_1(p["n"], p["b"], p["d"], p["e"], spec, p["q"]),
        "THM6": lambda: thomae_like_2(p["a"], p["b"], p["d"], p["e"], spec, p["q"]),
        "COR7a": lambda: cor_q0_unit("first", p["b"], p["d"], p["e"], spec, n=p["n"]),
        "COR7b": lambda: cor_q0_unit(p.get("variant", "second"), p["b"], p["d"], p["e"], spec,
                                     a=p["a"]),
        "RED_LEMMA": lambda: pfq_unit_reduction(p["top"], p["bottom"], p["r"]),
        "EX2": lambda: example2_chain(p["a"], p["b"], p["d"], p["f"], e=p.get("e"), r=p.get("r")),
        "EX3_SUM": lambda: example3_sum(p["a"], p["b"], p["d"], p["f"], p["r"]),
        "EX4": lambda: example4_6f5(p["a"], p["b"], p["d"], p["e"], p["f1"], p["f2"], p["f3"]),
    }
    return table[identity_id]()


def run_identity(identity_id: str, params: dict, spec: Optional[IpdSpec], x) -> Residual:
    """Check constraints and evaluate one case of any catalog identity."""
    if identity_id in IDENTITY_IDS:
        check_constraints(identity_id, params, spec)
        return evaluate(identity_id, params, spec, complex(x))
    return evaluate_unit(identity_id, params, spec)


def _num(z):
    z = complex(z)
    return [z.real, z.imag]


def jsonable(value):
    """Echo a parameter value in a JSON-friendly form (complex as ``[re, im]``)."""
    if isinstance(value, IpdSpec):
        return {"f": [_num(v) for v in value.f], "m": list(value.m)}
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, (float, complex, np.number)):
        return _num(value)
    if isinstance(value, dict):
        return {k: jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return str(value)


def case_record(index: int, identity_id: str, params, spec, x, tol: float,
                runner: Optional[Callable[[], Residual]] = None) -> dict:
    """Run one case and build its report record.

    ``status`` is ``pass``, ``fail`` (numeric failure or error) or
    ``skipped`` (no admissible draw, or a constraint violation).  ``runner``
    replaces the catalog dispatch when given.
    """
    rec = {"case": index, "identity_id": identity_id,
           "params": None, "lhs": None, "rhs": None, "rel_err": None,
           "terms_used": 0, "flags": [], "status": "skipped"}
    if params is None:
        rec["flags"] = ["no_admissible_draw"]
        return rec
    echo = dict(params)
    if spec is not None:
        echo["spec"] = spec
    if x is not None:
        echo["x"] = x
    rec["params"] = jsonable(echo)
    try:
        res = runner() if runner is not None else run_identity(identity_id, params, spec, x)
    except ConstraintViolation as exc:
        rec["flags"] = [f"ConstraintViolation: {exc}"]
        return rec
    except (HypidError, ArithmeticError, ValueError) as exc:
        rec["flags"] = [f"{type(exc).__name__}: {exc}"]
        rec["status"] = "fail"
        return rec
    rec.update(lhs=_num(res.lhs), rhs=_num(res.rhs), rel_err=res.rel_err,
               terms_used=int(res.lhs_report.terms_used + res.rhs_report.terms_used),
               flags=list(res.flags))
    if not res.converged:
        rec["flags"].append("not_converged")
    rec["status"] = "pass" if res.passed(tol) else "fail"
    return rec


def summarize(records: list) -> dict:
    errs = [r["rel_err"] for r in records if r["rel_err"] is not None]
    return {
        "count": len(records),
        "pass": sum(r["status"] == "pass" for r in records),
        "fail": sum(r["status"] == "fail" for r in records),
        "skipped": sum(r["status"] == "skipped" for r in records),
        "max_rel_err": max(errs) if errs else None,
        "median_rel_err": statistics.median(errs) if errs else None,
    }


@dataclass
class Report:
    """Per-case records plus a summary; ``ok`` when nothing failed."""

    records: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    config: Optional[dict] = None

    @property
    def ok(self) -> bool:
        return self.summary.get("fail", 0) == 0

    def by_identity(self) -> dict:
        groups: dict = {}
        for r in self.records:
            groups.setdefault(r["identity_id"], []).append(r)
        return {k: summarize(v) for k, v in groups.items()}

    def to_jsonl(self) -> str:
        lines = [json.dumps(r, sort_keys=True) for r in self.records]
        tail = {"summary": self.summary, "by_identity": self.by_identity()}
        if self.config is not None:
            tail["config"] = self.config
        lines.append(json.dumps(tail, sort_keys=True))
        return "\n".join(lines) + "\n"


def run_check(cfg: RunConfig, progress: Optional[Callable[[str], None]] = None) -> Report:
    """Sample and check every selected identity; records are ordered by catalog then case."""
    records = []
    with term_cap(cfg.term_cap):
        for ident in CATALOG:
            if ident not in cfg.identities:
                continue
            if progress is not None:
                progress(ident)
            for index, case in enumerate(sample_cases(ident, cfg)):
                params, spec, x = case if case is not None else (None, None, None)
                records.append(case_record(index, ident, params, spec, x, cfg.rel_tol))
    conf = dataclasses.asdict(cfg)
    conf["identities"] = list(cfg.identities)
    return Report(records, summarize(records), conf)


# --- lemma limit studies ----------------------------------------------------------

#: Minimum separation of the predicted limit roots in random limit studies.
LIMIT_SEPARATION = 0.3


def limit_rng(seed: int, lemma: int) -> np.random.Generator:
    """Stream for random limit studies; keys follow those of :data:`CATALOG`."""
    if lemma not in (1, 2):
        raise ValueError("lemma must be 1 or 2")
    key = len(CATALOG) + lemma - 1
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(key,)))


def sample_limit_cases(seed: int, count: int, lemma: int,
                       cfg: Optional[RunConfig] = None) -> list:
    """Random admissible parameter sets ``{spec, q, b[, a]}`` for a limit study.

    Predicted limit roots are kept ``LIMIT_SEPARATION`` apart so that the
    assignment is unambiguous, and away from ``R(0) = 0`` so that the
    limiting ratio is a meaningful relative target.
    """
    cfg = cfg or RunConfig()
    box = Box(limit_rng(seed, lemma), cfg)
    out = []
    while len(out) < count:
        for _ in range(MAX_RESAMPLES):
            try:
                spec = box.spec()
                m = spec.m_total
                q = box.integer(0, m - 1)
                b = box.cx(-0.8, 2.5)
                if lemma == 1:
                    a = None
                    box.far_nonpos(b + m - q)
                    _exclusion(box, b, spec, q)
                    reduced = r_poly(b, spec, q)
                else:
                    a = box.cx(-0.8, 2.5)
                    box.far_nonpos(a + m - q)
                    box.far(a - b, range(q + 1 - m, q + 1))
                    _exclusion(box, a, spec, q)
                    reduced = rhat_poly(a, b, spec, q)
                if reduced.is_zero or abs(reduced(0.0)) < box.cfg.guard_band * reduced.scale:
                    raise _Reject("R(0)")
                pts = [complex(-j) for j in range(q + 1)] + root_list(reduced)
                gaps = [abs(u - v) for i, u in enumerate(pts) for v in pts[i + 1:]]
                if gaps and min(gaps) < LIMIT_SEPARATION:
                    raise _Reject("separation")
                case = {"spec": spec, "q": q, "b": b}
                if a is not None:
                    case["a"] = a
                out.append(case)
                break
            except (_Reject, HypidError):
                continue
        else:
            raise RuntimeError("no admissible limit-study parameters found")
    return out
