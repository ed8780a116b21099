"""Command-line front end.

Exit codes: 0 when every check passes, 2 when a mathematical check fails,
1 for malformed input.  Reports are versioned JSON unless ``--format`` says
otherwise; ``--output -`` (the default) writes to standard output.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from math import comb
from typing import Any, Dict, List, Optional, Sequence

from . import __version__
from .constructions import (LiftInfeasible, admissible_c, appendix_coefficients, appendix_expansion,
                            f1_family, f1_section2, f2_rhs_check, lift_chain, lift_defects, solve_f2,
                            special_c)
from .diffops import dtilde
from .harmonics import (WORKERS_ENV, QSpec, frobenius, hilbert_series, pij_module_check,
                        singular_scan, special_harmonic_delta_ek, special_harmonic_e1m)
from .poly import parse_polynomial
from .qfield import as_rational, format_rational
from .symfun import FormulaId, verify_catalog

SCHEMA = "qsteenrod.report/1"
OK, USAGE_ERROR, CHECK_FAILED = 0, 1, 2
DEFAULT_SEED = 20240101


class UsageError(Exception):
    pass


@dataclass
class Check:
    name: str
    passed: bool
    detail: Dict[str, Any] = field(default_factory=dict)


@dataclass
class Report:
    command: List[str]
    result: Dict[str, Any] = field(default_factory=dict)
    checks: List[Check] = field(default_factory=list)
    schema: str = SCHEMA
    version: str = __version__
    elapsed_seconds: Optional[float] = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def summary(self) -> Dict[str, int]:
        ok = sum(1 for c in self.checks if c.passed)
        return {"checks": len(self.checks), "passed": ok, "failed": len(self.checks) - ok}

    def to_dict(self) -> Dict[str, Any]:
        out = {
            "schema": self.schema,
            "version": self.version,
            "command": list(self.command),
            "status": "pass" if self.passed else "fail",
            "summary": self.summary(),
            "checks": [asdict(c) for c in self.checks],
            "result": self.result,
        }
        if self.elapsed_seconds is not None:
            out["elapsed_seconds"] = self.elapsed_seconds
        return out

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Report":
        return cls(
            command=list(data["command"]),
            result=data.get("result", {}),
            checks=[Check(**c) for c in data.get("checks", [])],
            schema=data["schema"],
            version=data["version"],
            elapsed_seconds=data.get("elapsed_seconds"),
        )


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _rational(text: str):
    try:
        return as_rational(text)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not an exact rational: {text!r}") from exc


def _qspec(text: str) -> QSpec:
    try:
        return QSpec.parse(text)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"q must be 'generic' or a rational p/q, got {text!r}") from exc


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--output", default="-", help="file path, or - for standard output")
    p.add_argument("--format", choices=("json", "csv", "text"), default="json")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--threads", type=int, default=None,
                   help=f"worker processes for per-degree kernels (default from ${WORKERS_ENV})")
    p.add_argument("--timing", action="store_true", help="include wall-clock time in the report")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qsteenrod", description="Exact computations with q-deformed Steenrod operators.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("verify-formulas", help="check the operator-action catalog on elementary products")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--formula", action="append", choices=[f.value for f in FormulaId])
    _common(p)

    p = sub.add_parser("construct", help="explicit lifts")
    csub = p.add_subparsers(dest="what", parser_class=_Parser)
    csub.required = True
    c = csub.add_parser("f1")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--method", choices=("section2", "family"), default="section2")
    c.add_argument("--c", type=_rational, default=None)
    _common(c)
    c = csub.add_parser("lift")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--f0", required=True, help="file holding a polynomial in text form")
    c.add_argument("--steps", type=int, default=1)
    _common(c)
    c = csub.add_parser("f2")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--c", type=_rational, default=None, help="fix c instead of solving for it")
    _common(c)

    p = sub.add_parser("hilbert", help="graded dimensions of the q-harmonics")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=_qspec, default=QSpec.generic())
    p.add_argument("--max-degree", type=int, default=None)
    p.add_argument("--frobenius", action="store_true")
    _common(p)

    p = sub.add_parser("scan", help="search q0 = -a/b for singular values")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--a-max", type=int, required=True)
    p.add_argument("--b-max", type=int, required=True)
    p.add_argument("--max-degree", type=int, required=True)
    p.add_argument("--frobenius", action="store_true")
    _common(p)

    p = sub.add_parser("special", help="certify the special harmonic families")
    ssub = p.add_subparsers(dest="family", parser_class=_Parser)
    ssub.required = True
    s = ssub.add_parser("delta-ek")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    _common(s)
    s = ssub.add_parser("e1m")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    _common(s)
    s = ssub.add_parser("pij")
    for name in ("n", "k", "m", "i", "j"):
        s.add_argument(f"--{name}", type=int, required=True)
    _common(s)

    p = sub.add_parser("verify", help="appendix checks")
    vsub = p.add_subparsers(dest="what", parser_class=_Parser)
    vsub.required = True
    v = vsub.add_parser("appendix")
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--u", type=_rational, default=as_rational(0))
    v.add_argument("--c", type=_rational, default=None, help="c for the coefficient check (default: the printed special c)")
    v.add_argument("--source", choices=("corrected", "published"), default="corrected")
    _common(v)
    return parser


def _need(cond: bool, message: str) -> None:
    if not cond:
        raise UsageError(message)


# ------------------------------------------------------------------ handlers

def _verify_formulas(a, report: Report) -> None:
    _need(1 <= a.n <= 8, "--n must be between 1 and 8")
    res = verify_catalog(a.n, a.formula)
    report.result = {"n": a.n, "formulas": res}
    for fid, r in res.items():
        report.checks.append(Check(fid, r["failed"] == 0, r))


def _construct(a, report: Report) -> None:
    if a.what == "f1":
        if a.method == "section2":
            _need(a.n >= 3, "section2 needs --n >= 3")
            f = f1_section2(a.n)
        else:
            _need(a.n >= 5, "family needs --n >= 5")
            c = a.c if a.c is not None else special_c(a.n)
            f = f1_family(a.n, c)
            report.result["c"] = format_rational(c)
        d1, d2 = lift_defects(f)
        report.result.update({"n": a.n, "method": a.method, "f1": str(f), "terms": len(f.terms)})
        report.checks.append(Check("nabla1", not d1, {"defect": str(d1)} if d1 else {}))
        report.checks.append(Check("nabla2", not d2, {"defect": str(d2)} if d2 else {}))
    elif a.what == "lift":
        _need(a.n >= 1 and a.steps >= 1, "--n and --steps must be positive")
        try:
            with open(a.f0, encoding="utf-8") as fh:
                f0 = parse_polynomial(fh.read(), a.n)
        except OSError as exc:
            raise UsageError(f"cannot read --f0: {exc}") from exc
        except ValueError as exc:
            raise UsageError(f"cannot parse --f0: {exc}") from exc
        _need(f0.homogeneous_degree() is not None or not f0, "--f0 must be homogeneous")
        report.result.update({"n": a.n, "steps": a.steps, "f0": str(f0)})
        try:
            chain = lift_chain(a.n, f0, a.steps)
        except LiftInfeasible as exc:
            report.checks.append(Check("feasible", False, {"reason": str(exc)}))
            return
        report.checks.append(Check("feasible", True))
        prev = f0
        report.result["lifts"] = [str(f) for f in chain]
        for i, f in enumerate(chain, start=1):
            d1, d2 = lift_defects(f, prev)
            report.checks.append(Check(f"step{i}", not d1 and not d2))
            prev = f
    else:
        _need(a.n >= 5, "f2 needs --n >= 5")
        try:
            sol = solve_f2(a.n, a.c)
        except LiftInfeasible as exc:
            report.result.update({"n": a.n, "c": format_rational(a.c), "admissible_c": format_rational(admissible_c(a.n))})
            report.checks.append(Check("feasible", False, {"reason": str(exc)}))
            return
        d1, d2 = lift_defects(sol.f2, sol.f1)
        report.result.update({"n": a.n, "c": format_rational(sol.c), "f2": str(sol.f2)})
        report.checks.append(Check("feasible", True))
        report.checks.append(Check("lift_defects", not d1 and not d2))


def _default_degree(n: int, q: QSpec, given: Optional[int]) -> int:
    if given is not None:
        _need(given >= 0, "--max-degree must be non-negative")
        return given
    _need(q.is_generic or q.value == 0, "--max-degree is required for a rational q other than 0")
    return comb(n, 2)


def _hilbert(a, report: Report) -> None:
    _need(a.n >= 1, "--n must be at least 1")
    D = _default_degree(a.n, a.q, a.max_degree)
    hs = hilbert_series(a.n, a.q, D, seed=a.seed)
    report.result = {"n": a.n, "q": a.q.label(), "dims": hs.dims, "max_degree": D}
    if a.frobenius:
        fr = frobenius(a.n, a.q, D)
        report.result["frobenius"] = {
            str(d): {" ".join(map(str, lam)): m for lam, m in mult.items()} for d, mult in fr.degrees.items()
        }
    report.checks.append(Check("constants", hs.dims[0] == 1))


def _scan(a, report: Report) -> None:
    _need(a.n >= 1, "--n must be at least 1")
    _need(1 <= a.a_max <= a.n, "--a-max must be between 1 and n")
    _need(a.b_max >= 1 and a.max_degree >= 0, "--b-max must be positive and --max-degree non-negative")
    rows = singular_scan(a.n, a.a_max, a.b_max, a.max_degree, compare_frobenius=a.frobenius)
    report.result = {
        "n": a.n, "max_degree": a.max_degree,
        "rows": [{"q0": format_rational(r.q0), "a": r.a, "b": r.b, "witness_degree": r.witness_degree,
                  "excess_dim": r.excess_dim, "status": r.status} for r in rows],
    }


def _special(a, report: Report) -> None:
    try:
        if a.family == "delta-ek":
            cert = special_harmonic_delta_ek(a.n, a.k)
        elif a.family == "e1m":
            cert = special_harmonic_e1m(a.n, a.k, a.m)
        else:
            rep = pij_module_check(a.n, a.k, a.m, a.i, a.j)
            report.result = {"q0": format_rational(rep.q0)}
            for name in ("nonzero", "harmonic", "cocycle", "equivariant"):
                report.checks.append(Check(name, getattr(rep, name)))
            return
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    report.result = {"q0": format_rational(cert.q0), "degree": cert.degree, "witness": str(cert.witness)}
    report.checks.append(Check("annihilated", cert.annihilated))
    for name, ok in cert.relations.items():
        report.checks.append(Check(name, ok))


def _verify(a, report: Report) -> None:
    _need(a.n >= 6, "verify appendix needs --n >= 6")
    chk = f2_rhs_check(a.n, a.u)
    report.result = {"n": a.n, "u": format_rational(a.u),
                     "g0_coefficients": {k: format_rational(v) for k, v in chk.coefficients.items()}}
    report.checks.append(Check("f2_rhs", chk.passed, {} if chk.passed else {"defect": str(chk.defect)}))
    c = a.c if a.c is not None else special_c(a.n)
    f = f1_family(a.n, c)
    coeff = lambda n, cc, s, w: appendix_coefficients(n, cc, s, w, source=a.source)
    for k in (1, 2):
        ok = appendix_expansion(a.n, c, k, coefficients=coeff) == -dtilde(f, k)
        report.checks.append(Check(f"dtilde{k}_expansion", ok, {"c": format_rational(c), "source": a.source}))


HANDLERS = {
    "verify-formulas": _verify_formulas,
    "construct": _construct,
    "hilbert": _hilbert,
    "scan": _scan,
    "special": _special,
    "verify": _verify,
}


# ------------------------------------------------------------------ output

def render(report: Report, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        rows = report.result.get("rows")
        if rows is not None:
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["q0", "a", "b", "witness_degree", "excess_dim", "status"])
            for r in rows:
                w.writerow([r["q0"], r["a"], r["b"], "" if r["witness_degree"] is None else r["witness_degree"],
                            "" if r["excess_dim"] is None else r["excess_dim"], r["status"]])
        else:
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["check", "passed"])
            for c in report.checks:
                w.writerow([c.name, int(c.passed)])
        return buf.getvalue()
    lines = [f"{' '.join(report.command)}: {'pass' if report.passed else 'FAIL'}"]
    for key, val in report.result.items():
        if not isinstance(val, (dict, list)):
            lines.append(f"  {key} = {val}")
        elif key == "dims":
            lines.append(f"  dims = {val}")
    for c in report.checks:
        lines.append(f"  [{'ok' if c.passed else 'FAIL'}] {c.name}")
    return "\n".join(lines) + "\n"


def _write(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def dispatch(argv: Optional[Sequence[str]] = None):
    """Run one command; returns (exit code, Report or None)."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(str(exc) + "\n")
        return USAGE_ERROR, None
    except SystemExit as exc:
        return (OK if not exc.code else USAGE_ERROR), None
    if args.threads is not None:
        if args.threads < 1:
            sys.stderr.write("--threads must be positive\n")
            return USAGE_ERROR, None
        os.environ[WORKERS_ENV] = str(args.threads)
    report = Report(command=argv)
    start = time.perf_counter()
    try:
        HANDLERS[args.command](args, report)
    except UsageError as exc:
        sys.stderr.write(f"{parser.prog}: error: {exc}\n")
        return USAGE_ERROR, None
    if args.timing:
        report.elapsed_seconds = round(time.perf_counter() - start, 3)
    _write(render(report, args.format), args.output)
    return (OK if report.passed else CHECK_FAILED), report


def main(argv: Optional[Sequence[str]] = None) -> int:
    code, _ = dispatch(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
