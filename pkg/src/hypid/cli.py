"""Command-line front end: ``hypid eval | check | limits | golden``.

Exit codes: 0 when everything passes, 1 on an identity failure, 2 on a
usage, parse or configuration error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import dataclasses
import io
import json
import re
import sys
from typing import Optional, Sequence

from . import golden
from .arith import IpdSpec
from .charpoly import lemma_limit_study
from .errors import HypidError
from .harness import (CATALOG, Report, RunConfig, case_record, jsonable, run_check,
                      sample_limit_cases, summarize)
from .hyp import HypSpec, eval_series, eval_unit

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    """Bad command line, expression or config file."""


# --- parsing -------------------------------------------------------------------

def parse_number(text: str, offset: int = 0) -> complex:
    """Parse a real or complex literal such as ``0.5``, ``-1e-3`` or ``1+2j``."""
    token = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(token)
    except ValueError:
        raise UsageError(f"cannot parse number {text.strip()!r} at position {offset}") from None


def _parse_list(text: str, offset: int) -> list:
    if not text.strip():
        return []
    out, pos = [], offset
    for item in text.split(","):
        out.append(parse_number(item, pos + len(item) - len(item.lstrip())))
        pos += len(item) + 1
    return out


def parse_expr(expr: str):
    """Parse ``"a1,a2;b1,b2;x"`` into ``(HypSpec, x)``.

    Raises UsageError naming the 0-based character position of the problem.
    """
    parts = expr.split(";")
    if len(parts) != 3:
        pos = len(expr) if len(parts) < 3 else len(";".join(parts[:3]))
        raise UsageError(f"expected 'tops;bottoms;x' with two ';' (problem at position {pos})")
    offsets = [0, len(parts[0]) + 1, len(parts[0]) + len(parts[1]) + 2]
    top = _parse_list(parts[0], offsets[0])
    bottom = _parse_list(parts[1], offsets[1])
    if not parts[2].strip():
        raise UsageError(f"missing argument x at position {offsets[2]}")
    x = parse_number(parts[2], offsets[2])
    return HypSpec(tuple(top), tuple(bottom)), x


_INT_KEYS = {"seed", "draws", "r_max", "m_total_max", "term_cap"}
_FLOAT_KEYS = {"x_box", "guard_band", "rel_tol"}


def _parse_identities(text: str) -> tuple:
    text = text.strip()
    if text.lower() in ("", "all"):
        return CATALOG
    return tuple(t.strip() for t in re.split(r"[,\s]+", text) if t.strip())


def read_config(path: str) -> dict:
    """Read a flat ``key = value`` file whose keys mirror :class:`RunConfig`."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_string("[run]\n" + fh.read(), source=path)
    except (OSError, configparser.Error) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    out = {}
    for key, raw in parser["run"].items():
        try:
            if key in _INT_KEYS:
                out[key] = int(raw)
            elif key in _FLOAT_KEYS:
                out[key] = float(raw)
            elif key == "identities":
                out[key] = _parse_identities(raw)
            else:
                raise UsageError(f"{path}: unknown key {key!r}")
        except ValueError:
            raise UsageError(f"{path}: bad value for {key}: {raw!r}") from None
    return out


def build_config(args) -> RunConfig:
    values = read_config(args.config) if args.config else {}
    for flag, key in (("seed", "seed"), ("draws", "draws"), ("tol", "rel_tol")):
        if getattr(args, flag) is not None:
            values[key] = getattr(args, flag)
    if args.identities is not None:
        values["identities"] = _parse_identities(args.identities)
    try:
        return RunConfig(**values)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid configuration: {exc}") from None


# --- output ----------------------------------------------------------------------

def _emit(text: str, out: Optional[str]) -> None:
    if out:
        try:
            with open(out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise UsageError(f"cannot write {out}: {exc}") from None
    else:
        sys.stdout.write(text)


def _summary_line(name: str, s: dict) -> str:
    mx = "-" if s["max_rel_err"] is None else f"{s['max_rel_err']:.2e}"
    md = "-" if s["median_rel_err"] is None else f"{s['median_rel_err']:.2e}"
    return (f"{name}: {s['count']} cases, {s['pass']} pass, {s['fail']} fail, "
            f"{s['skipped']} skipped, max rel_err {mx}, median {md}")


# --- subcommands -------------------------------------------------------------------

def cmd_eval(args) -> int:
    spec, x = parse_expr(args.expr)
    try:
        rep = eval_unit(spec) if x == 1 else eval_series(spec, x)
    except (HypidError, ArithmeticError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    fields = dataclasses.asdict(rep)
    if args.format == "json":
        fields["value"] = jsonable(rep.value)
        _emit(json.dumps(fields, sort_keys=True) + "\n", args.out)
    else:
        v = complex(rep.value)
        value = repr(v.real) if v.imag == 0 else repr(v)
        lines = [f"value = {value}"] + [f"{k} = {fields[k]}" for k in
                                        ("terms_used", "tail_bound", "converged", "max_partial")]
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if rep.converged else EXIT_FAIL


def cmd_check(args) -> int:
    cfg = build_config(args)
    report = run_check(cfg)
    _emit(report.to_jsonl(), args.out)
    print(_summary_line("check", report.summary), file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_FAIL


def _limit_rows(study, label) -> list:
    rows = []
    for rec in study.as_records():
        rows.append({"study": label, "lemma": study.lemma, "q": study.q,
                     "eps": rec["eps"], "root_re": rec["root"].real, "root_im": rec["root"].imag,
                     "limit_re": rec["limit"].real, "limit_im": rec["limit"].imag,
                     "error": rec["error"], "ratio_re": rec["ratio"].real,
                     "ratio_im": rec["ratio"].imag})
    return rows


def _study_summary(study, label) -> dict:
    return {"study": label, "lemma": study.lemma, "q": study.q,
            "predicted_ratio": jsonable(study.predicted_ratio),
            "extrapolated_ratio": jsonable(study.extrapolated_ratio),
            "ratio_rel_err": study.ratio_rel_err, "slope": study.slope,
            "max_error_last_eps": study.rows[-1].max_error}


def cmd_limits(args) -> int:
    try:
        eps = [float(v) for v in args.eps.split(",")] if args.eps else [1e-3, 1e-4, 1e-5]
    except ValueError:
        raise UsageError(f"cannot parse --eps {args.eps!r}") from None
    if args.random:
        cases = sample_limit_cases(args.seed or 0, args.random, args.lemma)
    else:
        if args.f is None or args.m is None or args.b is None:
            raise UsageError("limits needs --f, --m, --q and --b (plus --a for Q^_m), or --random")
        try:
            spec = IpdSpec(tuple(_parse_list(args.f, 0)), tuple(int(v) for v in args.m.split(",")))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        case = {"spec": spec, "q": args.q, "b": parse_number(args.b)}
        if args.a is not None:
            case["a"] = parse_number(args.a)
        cases = [case]
    rows, summaries = [], []
    try:
        for i, c in enumerate(cases):
            study = lemma_limit_study(c["spec"], c["q"], c["b"], c.get("a"), eps_list=eps)
            rows += _limit_rows(study, i)
            summaries.append(_study_summary(study, i) | {"params": jsonable(c)})
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    except HypidError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        _emit(buf.getvalue(), args.out)
        for s in summaries:
            print(f"study {s['study']}: slope {s['slope']:.3f}, ratio rel_err "
                  f"{s['ratio_rel_err']:.2e}", file=sys.stderr)
    else:
        text = "".join(json.dumps(r, sort_keys=True) + "\n" for r in rows)
        text += "".join(json.dumps({"summary": s}, sort_keys=True) + "\n" for s in summaries)
        _emit(text, args.out)
    return EXIT_OK


def run_golden() -> Report:
    records = []
    for i, case in enumerate(golden.corpus()):
        rec = case_record(i, case.name, {"kind": case.kind, "args": case.params}, None, None,
                          case.tol, runner=case.run)
        records.append(rec)
    return Report(records, summarize(records))


def cmd_golden(args) -> int:
    report = run_golden()
    _emit(report.to_jsonl(), args.out)
    print(_summary_line("golden", report.summary), file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_FAIL


# --- entry point --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hypid", description="Hypergeometric identity checker.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a pFq series given as 'a1,a2;b1;x'")
    p.add_argument("expr")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("check", help="random batch check of the identity catalog")
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--draws", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--identities", help="comma-separated ids, or 'all'")
    p.add_argument("--format", choices=("json",), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("limits", help="root tracking near a degenerate parameter value")
    p.add_argument("--f", help="comma-separated f_j")
    p.add_argument("--m", help="comma-separated m_j")
    p.add_argument("--q", type=int, default=0)
    p.add_argument("--b")
    p.add_argument("--a", help="give a to study Q^_m (second lemma)")
    p.add_argument("--eps", help="comma-separated decreasing eps values")
    p.add_argument("--random", type=int, default=0, help="run N random studies instead")
    p.add_argument("--lemma", type=int, choices=(1, 2), default=1,
                   help="with --random: 1 tracks Q_m, 2 tracks Q^_m")
    p.add_argument("--seed", type=int)
    p.add_argument("--format", choices=("json", "csv"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_limits)

    p = sub.add_parser("golden", help="run the fixed corpus of worked examples")
    p.add_argument("--out")
    p.add_argument("--format", choices=("json",), default="json")
    p.set_defaults(func=cmd_golden)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
