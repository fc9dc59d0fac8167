"""Command-line interface: ``qsys analyze|build|count|monodromy|bound|compare|deform``.

Exit codes: 0 success, 2 checklist failure or refused bound, 3 input
error, 4 numeric failure. ``QSYS_THREADS`` caps the worker threads.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .algebra.parse import ParseError, parse_polynomial, parse_rational
from .analytic.integrator import DEFAULT_TOL, IntegrationError
from .analytic.monodromy import monodromy_all
from .analytic.numeric import NumericFuchsian, as_numeric
from .analytic.zeros import BoundaryError, count_zeros
from .bounds import BoundsConfig, field_extension_bound
from .constructions import (
    AlgebraicSpec,
    ConstructionError,
    RationalMapSpec,
    construction_report,
    direct_sum,
    euler,
    from_algebraic,
    hypergeometric,
    monomial_extension,
    pullback,
    tensor,
)
from .io import (
    InputError,
    combination_from_data,
    csv_text,
    dumps,
    flow_spec_from_dict,
    load_json,
    parse_complex,
    read_json_file,
    read_system,
    system_from_dict,
    triangle_from_dict,
    write_system,
)
from .pfaffian import FuchsianSystem, NotFuchsianError, complexity, to_fuchsian
from .report import COMPARE_HEADER, COMPARE_SCHEMA, BoundsRefused, analyze, bounds_for, campaign, default_triangles
from .schlesinger import flow, isomonodromy_check

EXIT_OK, EXIT_CHECK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3, 4


def _json_arg(text: str, what: str):
    """Inline JSON or ``@file``."""
    if text.startswith("@"):
        return read_json_file(text[1:])
    p = Path(text)
    if not text.lstrip().startswith(("[", "{")) and p.is_file():
        return read_json_file(p)
    return load_json(text, what)


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _load_with_fixture(path):
    """System plus the raw record (fixture files carry extra sections)."""
    data = read_json_file(path)
    record = data if isinstance(data, dict) and "system" in data else {}
    system = system_from_dict(record["system"] if record else data, str(path))
    return system, record


def _as_form(system):
    if isinstance(system, FuchsianSystem):
        return system.to_one_form()
    return system


# ----------------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------------

def cmd_analyze(args) -> int:
    system = read_system(args.file)
    rep = analyze(system, tol=args.tol)
    _emit(dumps(rep), args.out)
    return EXIT_OK if rep["q_system"] else EXIT_CHECK


def cmd_build(args) -> int:
    kind, rest = args.kind, args.args
    inputs = []
    if kind == "algebraic":
        if len(rest) != 1:
            raise InputError("build algebraic takes one polynomial, e.g. \"y^2 - t\"")
        P = parse_polynomial(rest[0])
        result = from_algebraic(AlgebraicSpec(P, args.y))
    elif kind == "euler":
        if len(rest) != 1:
            raise InputError("build euler takes one residue matrix as JSON")
        data = _json_arg(rest[0], "residue")
        result = euler(system_from_dict({"poles": ["0"], "residues": [data]}, "residue").residues[0])
    elif kind == "hypergeometric":
        if len(rest) != 3:
            raise InputError("build hypergeometric takes a b c")
        result = hypergeometric(*(_fraction(x) for x in rest))
    elif kind in ("sum", "tensor"):
        if len(rest) != 2:
            raise InputError(f"build {kind} takes two system files")
        A, B = (_as_form(read_system(f)) for f in rest)
        inputs = [A, B]
        result = direct_sum(A, B) if kind == "sum" else tensor(A, B)
    elif kind == "pullback":
        if len(rest) != 1 or not args.map:
            raise InputError("build pullback takes one system file and --map var=expr (repeatable)")
        A = _as_form(read_system(rest[0]))
        inputs = [A]
        comps = {}
        for m in args.map:
            name, _, expr = m.partition("=")
            if not expr:
                raise InputError(f"--map expects var=expr, got {m!r}")
            comps[name.strip()] = parse_rational(expr)
        source = sorted({v for f in comps.values() for v in f.free_variables()})
        if not source:
            raise InputError("the map has no source variables")
        result = pullback(A, RationalMapSpec(tuple(source), comps))
    elif kind == "monomial-ext":
        if len(rest) != 1 or args.delta is None:
            raise InputError("build monomial-ext takes one system file and --delta")
        A = _as_form(read_system(rest[0]))
        inputs = [A]
        result, _ = monomial_extension(A, args.delta)
    else:
        raise InputError(f"unknown construction {kind!r}")
    text = write_system(result)
    form = _as_form(result)
    report = construction_report(inputs, form)
    report["kind"] = kind
    if args.out:
        Path(args.out).write_text(text)
        sys.stdout.write(dumps(report) + "\n")
    else:
        sys.stdout.write(text)
        sys.stderr.write(dumps(report) + "\n")
    return EXIT_OK


def _fraction(text):
    try:
        return Fraction(text)
    except ValueError:
        raise InputError(f"expected a rational number, got {text!r}") from None


def cmd_count(args) -> int:
    system, record = _load_with_fixture(args.file)
    spec = record.get("count", {})
    n = system.n
    coeffs = _json_arg(args.coeffs, "coefficients") if args.coeffs else spec.get("combination")
    tri = _json_arg(args.triangle, "triangle") if args.triangle else spec.get("triangle")
    if coeffs is None or tri is None:
        raise InputError("count needs --coeffs and --triangle (or a fixture with a 'count' section)")
    c = combination_from_data(coeffs, n, "coefficients")
    T = triangle_from_dict(tri, "triangle")
    x0 = _json_arg(args.x0, "X0") if args.x0 else spec.get("X0")
    X0 = None if x0 is None else np.array([[parse_complex(z, "X0") for z in row] for row in x0])
    basepoint = parse_complex(_json_arg(args.basepoint, "basepoint"), "basepoint") if args.basepoint else \
        (parse_complex(spec["basepoint"], "basepoint") if "basepoint" in spec else None)
    line = None
    if args.line:
        ld = _json_arg(args.line, "line")
        line = ([parse_complex(z) for z in ld["point"]], [parse_complex(z) for z in ld["direction"]])
    zc = count_zeros(system, c, T, basepoint=basepoint, X0=X0, tol=args.tol, line=line)
    _emit(dumps(zc.to_dict()), args.out)
    return EXIT_OK


def cmd_monodromy(args) -> int:
    system = read_system(args.file)
    if not isinstance(system, FuchsianSystem):
        system = to_fuchsian(system)
    bp = parse_complex(_json_arg(args.basepoint, "basepoint"), "basepoint") if args.basepoint else None
    res = monodromy_all(NumericFuchsian.from_exact(system), bp, tol=args.tol)
    rep = {
        "basepoint": res.basepoint,
        "poles": res.poles,
        "loops": [r.to_dict() for r in res.loops],
        "infinity": res.infinity.to_dict(),
        "product_residual": res.product_residual,
        "relation": "M_inf * M_p * ... * M_1 = I",
    }
    _emit(dumps(rep), args.out)
    return EXIT_OK


def cmd_bound(args) -> int:
    system = read_system(args.file)
    config = BoundsConfig.from_dict(_json_arg(args.config, "config")) if args.config else BoundsConfig()
    if args.which == "field":
        if args.delta is None:
            raise InputError("--delta is required for the field-extension bound")
        bounds_for(system, (), config)  # refuses rejected systems
        rep = field_extension_bound(complexity(_as_form(system)), args.delta, config)
    else:
        rep = bounds_for(system, (args.which,), config)[args.which]
    _emit(dumps(rep.to_dict()), args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    system, record = _load_with_fixture(args.file)
    camp = _json_arg(args.campaign, "campaign") if args.campaign else record.get("campaign")
    if not isinstance(camp, dict):
        raise InputError("compare needs --campaign (or a fixture with a 'campaign' section)", "campaign")
    triangles = [triangle_from_dict(t, f"campaign.triangles[{k}]") for k, t in enumerate(camp.get("triangles", []))]
    if not triangles:
        poles = as_numeric(system).singular_points()
        triangles = default_triangles(poles, int(camp.get("count", 20)), int(camp.get("seed", 0)))
    which = tuple(camp.get("bounds", ["euler", "rho", "q"]))
    config = BoundsConfig.from_dict(camp.get("config"))
    x0 = camp.get("X0")
    X0 = None if x0 is None else np.array([[parse_complex(z, "X0") for z in row] for row in x0])
    rows, _ = campaign(system, triangles, seed=int(camp.get("seed", 0)),
                       per_triangle=int(camp.get("combinations_per_triangle", 10)), which=which,
                       config=config, X0=X0, tol=args.tol)
    _emit(csv_text(COMPARE_SCHEMA, COMPARE_HEADER, rows), args.out)
    return EXIT_OK


def cmd_deform(args) -> int:
    data = _json_arg(args.spec, "flow spec")
    if isinstance(data, dict) and "flow" in data:
        data = data["flow"]
    path, opts = flow_spec_from_dict(data)
    tol = args.tol if args.tol is not None else float(opts.get("tol", 1e-10))
    traj = flow(path, tol=tol, checkpoints=int(opts.get("checkpoints", args.checkpoints)))
    text = traj.to_jsonl()
    if args.check and traj.completed:
        rep = isomonodromy_check(traj)
        text += dumps({"type": "isomonodromy", **rep.to_dict()}, indent=None) + "\n"
    _emit(text, args.out)
    for e in traj.events:
        sys.stderr.write(f"event {e.kind} at tau={e.tau:.6g}: {e.message}\n")
    return EXIT_OK if traj.completed else EXIT_NUMERIC


# ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qsys", description="Fuchsian and Pfaffian systems over Q: "
                                "certificates, monodromy, zero counts and bounds.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="Q-system checklist for a system file")
    a.add_argument("file")
    a.add_argument("--tol", type=float, default=1e-10, help="integrator tolerance for growth probes (default 1e-10)")
    a.add_argument("-o", "--out")
    a.set_defaults(func=cmd_analyze)

    b = sub.add_parser("build", help="construct a system file")
    b.add_argument("kind", choices=["algebraic", "euler", "hypergeometric", "sum", "tensor", "pullback",
                                    "monomial-ext"])
    b.add_argument("args", nargs="*")
    b.add_argument("--y", default="y", help="algebraic variable (default y)")
    b.add_argument("--map", action="append", help="pullback component var=expr (repeatable)")
    b.add_argument("--delta", type=int)
    b.add_argument("-o", "--out")
    b.set_defaults(func=cmd_build)

    c = sub.add_parser("count", help="zeros of sum c_ij X_ij inside an arc triangle")
    c.add_argument("file")
    c.add_argument("--coeffs", help="coefficient matrix (JSON or @file)")
    c.add_argument("--triangle", help="{\"vertices\": [[re, im] x3], \"curvatures\": [k0, k1, k2]}")
    c.add_argument("--x0", help="fundamental matrix at the basepoint (default identity)")
    c.add_argument("--basepoint", help="basepoint inside the triangle (default first vertex)")
    c.add_argument("--line", help="{\"point\": [...], \"direction\": [...]} for systems in several variables")
    c.add_argument("--tol", type=float, default=DEFAULT_TOL, help=f"local tolerance (default {DEFAULT_TOL:g})")
    c.add_argument("-o", "--out")
    c.set_defaults(func=cmd_count)

    m = sub.add_parser("monodromy", help="small-loop monodromies on a common spider")
    m.add_argument("file")
    m.add_argument("--basepoint")
    m.add_argument("--tol", type=float, default=DEFAULT_TOL, help=f"local tolerance (default {DEFAULT_TOL:g})")
    m.add_argument("-o", "--out")
    m.set_defaults(func=cmd_monodromy)

    bd = sub.add_parser("bound", help="evaluate a zero-count bound")
    bd.add_argument("file")
    bd.add_argument("--which", choices=["euler", "rho", "q", "field"], default="rho")
    bd.add_argument("--config", help="bound coefficients (JSON or @file)")
    bd.add_argument("--delta", type=int)
    bd.add_argument("-o", "--out")
    bd.set_defaults(func=cmd_bound)

    cp = sub.add_parser("compare", help="random-combination campaign against the bounds (CSV)")
    cp.add_argument("file")
    cp.add_argument("--campaign", help="{\"triangles\", \"seed\", \"combinations_per_triangle\", "
                                      "\"bounds\", \"config\", \"X0\"} (JSON or @file)")
    cp.add_argument("--tol", type=float, default=1e-10)
    cp.add_argument("-o", "--out")
    cp.set_defaults(func=cmd_compare)

    d = sub.add_parser("deform", help="Schlesinger flow; JSON-lines checkpoint archive")
    d.add_argument("spec", help="flow spec (JSON or @file)")
    d.add_argument("--tol", type=float, default=None, help="local tolerance (default 1e-10)")
    d.add_argument("--checkpoints", type=int, default=11)
    d.add_argument("--check", action="store_true", help="append the monodromy invariant drift")
    d.add_argument("-o", "--out")
    d.set_defaults(func=cmd_deform)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except BoundsRefused as exc:
        sys.stderr.write(f"bound refused: {exc}\n")
        return EXIT_CHECK
    except (IntegrationError, BoundaryError) as exc:
        sys.stderr.write(f"numeric failure: {exc}\n")
        return EXIT_NUMERIC
    except (InputError, ParseError, NotFuchsianError, ConstructionError, ValueError, KeyError) as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
