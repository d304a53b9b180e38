"""Command-line interface: every command prints one JSON report.

Exit codes: 0 when every requested verification passes, 1 when a verification
fails, 2 on input or analysis errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .deformation import deform, verify_apparent
from .errors import HeunError, SpecSyntaxError
from .heun_class import HeunOperator, classify, to_normal_form
from .isomonodromy import (TimeFamily, condition_I, condition_II, condition_III, hamiltonian,
                           select_subcase, verify_full_compatibility)
from .numerics import IntegratorConfig, State, integrate, residual_second_order
from .painleve_catalog import (canonical_equivalences, catalog_dump, derive_second_order,
                               supertype_reductions, supertype_scaling, verify_catalog)
from .parser import _Parser, _evaluate, parse_spec
from .polyalg import INF, RatFunc
from .schemas import SCHEMA_VERSION
from .sing_analysis import DEFAULT_ORDER, analyze, thome


def series_order(cli_value: int | None = None) -> int:
    if cli_value is not None:
        return cli_value
    env = os.environ.get("HEUN_SERIES_ORDER")
    return int(env) if env else DEFAULT_ORDER


def _text(x) -> str:
    if x is INF:
        return "inf"
    return str(x)


def _read_spec(arg: str):
    if arg == "-":
        text = sys.stdin.read()
    elif os.path.isfile(arg):
        with open(arg, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = arg
    return parse_spec(text)


def _heun(ps) -> HeunOperator:
    if not isinstance(ps.operator, HeunOperator):
        raise HeunError("this command needs a sigma/tau/eta spec")
    return ps.operator


def _expression(text: str, names) -> RatFunc:
    p = _Parser(text)
    node = p.expr()
    if not p.at("eof"):
        p.fail(["end of expression"])
    return _evaluate(node, set(names))


def _index_pair(ip) -> dict:
    return {
        "sum": str(ip.total),
        "product": str(ip.product),
        "roots": None if ip.roots is None else [str(r) for r in ip.roots],
        "radicand": None if ip.radicand is None else str(ip.radicand),
    }


def _point(rep) -> dict:
    return {
        "location": _text(rep.location),
        "rank": str(rep.rank),
        "rounded_rank": rep.rounded_rank,
        "absolute_rank": None if rep.absolute_rank is None else str(rep.absolute_rank),
        "fuchsian": rep.fuchsian,
        "grounded": rep.grounded,
        "indices": _index_pair(rep.indices),
    }


def _step(st) -> dict:
    return {"kind": st.kind, "site": _text(st.site), "data": [_text(d) for d in st.data]}


# ---------------------------------------------------------------------------
# commands


def cmd_classify(args) -> dict:
    op = _heun(_read_spec(args.spec))
    sym = classify(op, generic=args.generic)
    points = [r for r, _ in op.roots] + [INF]
    reports = [_point(analyze(op.principal, p, generic=args.generic)) for p in points]
    return {
        "ok": True,
        "symbol": sym.symbol,
        "ascii": sym.ascii,
        "name": sym.name,
        "riemann_reducible": sym.riemann_reducible,
        "riemann_row": sym.riemann_row,
        "supertype": sym.supertype,
        "singularities": reports,
    }


def cmd_normalize(args) -> dict:
    op = _heun(_read_spec(args.spec))
    nf = to_normal_form(op, generic=args.generic)
    return {
        "ok": True,
        "type": nf.type,
        "row": nf.row,
        "operator": {"sigma": str(nf.sigma), "tau": str(nf.tau), "eta": str(nf.eta)},
        "constraints": {str(k): str(v) for k, v in nf.constraint_report.items()},
        "trace": [_step(s) for s in nf.trace.steps],
        "riemann_row": nf.riemann_row,
    }


def cmd_indices(args) -> dict:
    ps = _read_spec(args.spec)
    op = ps.operator
    A = op.principal if isinstance(op, HeunOperator) else op
    point = INF if args.at.strip() in ("inf", "oo", "infinity") else _expression(args.at, ps.params)
    N = series_order(args.order)
    rep = analyze(A, point, generic=args.generic)
    heads = []
    for sol in thome(A, point, N, generic=args.generic):
        heads.append({
            "kind": sol.kind,
            "index": str(sol.index),
            "ramification": sol.ramification,
            "exponential_part": {str(k): str(v) for k, v in sol.exponential_part.items()},
            "logarithmic": sol.log_partner,
            "series": [str(v) for v in sol.series[: args.terms]],
        })
    return {"ok": True, "point": _point(rep), "order": N, "heads": heads}


def cmd_deform(args) -> dict:
    ps = _read_spec(args.spec)
    op = _heun(ps)
    names = set(ps.params) | {"lam", "mu"}
    lam = _expression(args.lam, names) if args.lam else RatFunc("lam")
    mu = _expression(args.mu, names) if args.mu else RatFunc("mu")
    d = deform(op, lam, mu)
    rep = verify_apparent(d, args.order or 4)
    ratio_ok = rep.ratio == d.mu
    return {
        "ok": rep.apparent and ratio_ok,
        "lambda": str(d.lam),
        "mu": str(d.mu),
        "first_order": str(d.first_order),
        "zeroth_order": str(d.zeroth_order),
        "p": str(d.p),
        "q": str(d.q),
        "indices": list(rep.indices),
        "v": [str(v) for v in rep.v_series[:4]],
        "row1": str(rep.row1),
        "apparent": rep.apparent,
    }


def cmd_derive(args) -> dict:
    ps = _read_spec(args.spec)
    op = _heun(ps)
    if ps.time is None:
        raise HeunError("derive needs a `time NAME` declaration")
    if ps.time != "t":
        if "t" in ps.params:
            raise HeunError("rename the parameter t before using another time name")
        op = op.subs({ps.time: RatFunc("t")})
    fam = TimeFamily(op, _expression(args.scale, ()) if args.scale else None)
    sc = select_subcase(fam)[0]
    data = hamiltonian(fam, sc)
    comp = verify_full_compatibility(fam, data)
    conds = [condition_I(fam, sc), condition_II(fam, sc), condition_III(fam, sc)]
    ode = derive_second_order(data.H)
    ok = comp["ok"] and all(c.is_zero for c in conds)
    return {
        "ok": ok,
        "subcase": sc.tag,
        "scale": str(sc.scale),
        "m": str(sc.m_effective),
        "excluded_times": [str(f) for f in sc.excluded_times],
        "c": str(data.c),
        "a": str(data.a),
        "b": str(data.b),
        "H": str(data.H),
        "ode": {"A": str(ode.A), "B": str(ode.B), "C": str(ode.C), "rhs": str(ode.rhs)},
        "conditions": [str(c) for c in conds],
        "compatibility": {k: str(v) for k, v in comp.items() if k != "ok"},
    }


def cmd_catalog(args) -> dict:
    return {"ok": True, "entries": catalog_dump(args.type)}


def cmd_verify_catalog(args) -> dict:
    reports = verify_catalog()
    entries = [{"type": r.tag, "ok": r.ok, "conditions_zero": r.conditions_zero,
                "compatibility_zero": r.compatibility_zero, "unified_agrees": r.unified_agrees,
                "hamiltonian_matches": r.hamiltonian_matches, "ode_matches": r.ode_matches,
                **r.details} for r in reports]
    eqs = [{"name": e.name, "ok": e.ok} for e in canonical_equivalences()]
    scal = [{"name": s.name, "ok": s.ok} for s in supertype_scaling()]
    reds = [{"name": f"{r.supertype}->{r.target} ({r.level})", "ok": r.ok}
            for r in supertype_reductions()]
    passed = sum(r.ok for r in reports)
    ok = passed == len(reports) and all(x["ok"] for x in eqs + scal + reds)
    return {"ok": ok, "passed": passed, "total": len(reports), "entries": entries,
            "equivalences": eqs, "scaling": scal, "reductions": reds}


def _params(text: str | None) -> dict:
    out: dict = {}
    if not text:
        return out
    for item in text.split(","):
        if not item.strip():
            continue
        key, sep, val = item.partition("=")
        if not sep:
            raise HeunError(f"parameter {item!r} is not NAME=VALUE")
        out[key.strip()] = Fraction(val.strip())
    return out


def cmd_integrate(args) -> dict:
    params = _params(args.params)
    try:
        t0, l0, m0 = (float(Fraction(x)) for x in args.init.split(","))
    except ValueError as exc:
        raise HeunError(f"--init needs t0,l0,m0: {exc}") from None
    cfg = IntegratorConfig(method=args.method, abs_tol=args.tol, rel_tol=args.tol,
                           h_init=min(args.h_max, 1e-3), h_max=args.h_max)
    traj = integrate(args.type, params, State(t0, l0, m0), args.t_end, cfg)
    residual = None
    if len(traj.samples) >= 5:
        residual = residual_second_order(traj, args.type)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(traj.to_csv())
    body = traj.to_json()
    return {
        "ok": traj.termination == "completed",
        "type": args.type,
        "params": {k: str(v) for k, v in params.items()},
        "termination": traj.termination,
        "step_stats": traj.step_stats,
        "samples": body["samples"] if args.samples else [],
        "residual": residual,
        "config": body["config"],
    }


COMMANDS = {
    "classify": cmd_classify,
    "normalize": cmd_normalize,
    "indices": cmd_indices,
    "deform": cmd_deform,
    "derive": cmd_derive,
    "catalog": cmd_catalog,
    "verify-catalog": cmd_verify_catalog,
    "integrate": cmd_integrate,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="heunpainleve",
                                 description="Heun class operators and Painleve equations")
    sub = ap.add_subparsers(dest="command", required=True)

    def with_spec(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("spec", help="spec text, a file path, or - for stdin")
        p.add_argument("--generic", action="store_true",
                       help="treat symbolic leading coefficients as nonzero")
        return p

    with_spec("classify", "type symbol and singularity reports")
    with_spec("normalize", "normal form and transform trace")
    p = with_spec("indices", "indices, rank and formal solution heads at a point")
    p.add_argument("--at", required=True, help="a point expression or inf")
    p.add_argument("--order", type=int, default=None, help="series truncation N")
    p.add_argument("--terms", type=int, default=4, help="series terms to print")
    p = with_spec("deform", "deformed operator and apparency report")
    p.add_argument("--lambda", dest="lam", default=None)
    p.add_argument("--mu", dest="mu", default=None)
    p.add_argument("--order", type=int, default=None,
                   help="series terms at lambda (default 4; symbolic growth is steep)")
    p = with_spec("derive", "isomonodromic Hamiltonian and second-order equation")
    p.add_argument("--scale", default=None, help="pin the time scale")
    p = sub.add_parser("catalog", help="catalog dump")
    p.add_argument("--type", default=None)
    sub.add_parser("verify-catalog", help="run the symbolic identity suites")
    p = sub.add_parser("integrate", help="integrate a catalog Hamiltonian flow")
    p.add_argument("--type", required=True)
    p.add_argument("--params", default="", help="NAME=VALUE,... with rational values")
    p.add_argument("--init", required=True, help="t0,lambda0,mu0")
    p.add_argument("--t-end", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--h-max", type=float, default=1e-3)
    p.add_argument("--method", choices=("rk4", "rkf45"), default="rkf45")
    p.add_argument("--csv", default=None, help="also write the trajectory as CSV")
    p.add_argument("--samples", action="store_true", help="include samples in the JSON")
    return ap


def run(argv=None) -> tuple[dict, int]:
    args = build_parser().parse_args(argv)
    try:
        body = COMMANDS[args.command](args)
        code = 0 if body["ok"] else 1
    except (HeunError, ZeroDivisionError, ValueError) as exc:
        err = {"type": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, SpecSyntaxError):
            err.update(line=exc.line, column=exc.column, expected=list(exc.expected))
        body, code = {"ok": False, "error": err}, 2
    return {"schema_version": SCHEMA_VERSION, "command": args.command, **body}, code


def main(argv=None) -> int:
    report, code = run(argv)
    json.dump(report, sys.stdout, indent=2, ensure_ascii=False)
    sys.stdout.write("\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
