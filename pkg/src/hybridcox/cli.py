"""Command-line front end.

Exit codes: 0 success, 2 domain errors (invalid or unrealizable input,
Andreev violations, bad interfaces), 3 solver or search-budget failures
(including inconclusive arithmeticity verdicts), 64 usage errors.

The default solver tolerance may be overridden with the environment
variable ``HYBRIDCOX_TOL``; ``--tol`` takes precedence over it.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import logging
import os
import sys
from fractions import Fraction

from .arithmetics import ArithmeticConfig, field_fingerprint, test_arithmetic_rightangled
from .combinatorics import (
    CombinatorialPolytope,
    antiprism,
    check_andreev,
    cube,
    glue,
    glue_antiprisms,
    prism,
    tetrahedron,
    twisted_antiprism,
)
from .errors import BudgetError, DomainError, InconsistencyError, SolverError
from .hybrid import (
    CoxeterPolygon,
    GluingSpec,
    LinkDescriptor,
    antiprism_gluing,
    check_even_angle_interface,
    classify_link,
    reference_polygon_gluing,
    format_angle,
    glue_polygons,
    hybrid_from_spec,
    parse_angle,
)
from .invariants import gram, volume_ideal
from .pipeline import family_polytope
from .realization import SolverConfig, realize_ideal_right_angled, validate_realization
from .svg import gluing_svg, polytope_svg
from .tables import DEFAULT_MAX_N, TABLES

EXIT_OK, EXIT_DOMAIN, EXIT_SOLVER, EXIT_USAGE = 0, 2, 3, 64
TOL_ENV = "HYBRIDCOX_TOL"
FORMATS = ("json", "csv", "text", "svg")

log = logging.getLogger(__name__)


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    """ArgumentParser that exits with status 64 on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=0, help="RNG seed for solver restarts")
    p.add_argument("--tol", type=float, default=None, help=f"solver tolerance (env {TOL_ENV}, default 1e-10)")
    p.add_argument("--max-cycle-len", type=int, default=None, help="longest cycle to enumerate")
    p.add_argument("--budget", type=int, default=10**7, help="cycle search node budget")
    p.add_argument("--method", choices=("certificate", "enumerate"), default="certificate")
    p.add_argument("-o", "--output", help="write to this file instead of stdout")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--format", choices=FORMATS, dest="format")
    for name in FORMATS:
        fmt.add_argument(f"--{name}", action="store_const", const=name, dest="format")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _inputs(p: argparse.ArgumentParser) -> None:
    p.add_argument("path", nargs="?", help="polytope file")
    p.add_argument("--stdin", action="store_true", help="read the polytope from standard input")
    p.add_argument("--family", choices=("antiprism", "twist"))
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = Parser(prog="hybridcox", description="Ideal right-angled polyhedra and hybrid Coxeter gluings.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text, description=help_text)

    p = add("gen", "generate a polytope file")
    p.add_argument("kind", choices=("antiprism", "prism", "tetrahedron", "cube"))
    p.add_argument("n", type=int, nargs="?")

    p = add("twist", "twisted antiprism A_{n,k}")
    p.add_argument("n", type=int)
    p.add_argument("k", type=int)

    p = add("glue", "glue antiprisms, polytope files or Coxeter polygons")
    g = p.add_subparsers(dest="what", required=True, metavar="WHAT")
    q = g.add_parser("antiprisms", parents=[common], help="A_k and A_m along belt triangles")
    q.add_argument("k", type=int)
    q.add_argument("m", type=int)
    q = g.add_parser("files", parents=[common], help="two polytope files along given faces")
    q.add_argument("file1")
    q.add_argument("face1", type=int)
    q.add_argument("file2")
    q.add_argument("face2", type=int)
    q = g.add_parser("polygons", parents=[common], help="two Coxeter polygons (default: the pi/4, pi/8 example)")
    _polygon_args(q)

    for name, text in (
        ("andreev", "check the right-angled Andreev conditions"),
        ("realize", "solve for the ideal right-angled realization"),
        ("gram", "Gram matrix of the realization"),
        ("volume", "hyperbolic volume"),
        ("arith", "arithmeticity of the reflection group"),
        ("fingerprint", "field fingerprint of the reflection group"),
    ):
        _inputs(add(name, text))

    p = add("hybrid", "nonarithmeticity verdict for a glued pair")
    g = p.add_subparsers(dest="what", required=True, metavar="WHAT")
    q = g.add_parser("antiprisms", parents=[common], help="A_k and A_m along belt triangles")
    q.add_argument("k", type=int)
    q.add_argument("m", type=int)
    q = g.add_parser("files", parents=[common], help="two polytope files along given faces")
    q.add_argument("file1")
    q.add_argument("face1", type=int)
    q.add_argument("file2")
    q.add_argument("face2", type=int)
    q = g.add_parser("polygons", parents=[common], help="interface check and glued polygon")
    _polygon_args(q)

    p = add("links", "link complements")
    g = p.add_subparsers(dest="what", required=True, metavar="WHAT")
    q = g.add_parser("classify", parents=[common], help="volume, verdict and class label")
    q.add_argument("n", type=int)
    q.add_argument("--link-family", choices=("C", "D"), default="C")

    p = add("table", "regenerate a classification table")
    p.add_argument("which", choices=sorted(TABLES))
    p.add_argument("--max-n", type=int, default=None)
    return parser


def _polygon_args(q: argparse.ArgumentParser) -> None:
    q.add_argument("--p1", help="comma-separated angles, e.g. pi/4,pi/8,pi/2")
    q.add_argument("--p2", help="comma-separated angles")
    q.add_argument("--side1", type=int, default=0)
    q.add_argument("--side2", type=int, default=0)


# ---- helpers -------------------------------------------------------------------------


def _tolerance(args) -> float:
    if args.tol is not None:
        return args.tol
    env = os.environ.get(TOL_ENV)
    if env:
        try:
            return float(env)
        except ValueError:
            raise UsageError(f"{TOL_ENV}={env!r} is not a number") from None
    return SolverConfig.tolerance


def _configs(args) -> tuple[SolverConfig, ArithmeticConfig]:
    solver = SolverConfig(tolerance=_tolerance(args), seed=args.seed)
    if args.max_cycle_len is not None and args.max_cycle_len < 2:
        raise UsageError("--max-cycle-len must be at least 2")
    if args.budget < 1:
        raise UsageError("--budget must be positive")
    arith = ArithmeticConfig(max_len=args.max_cycle_len, budget=args.budget, method=args.method)
    return solver, arith


def _load_polytope(args, stdin) -> CombinatorialPolytope:
    sources = [args.path is not None, bool(args.stdin), args.family is not None]
    if sum(sources) != 1:
        raise UsageError("give exactly one of PATH, --stdin or --family")
    if args.family is not None:
        if args.n is None:
            raise UsageError("--family needs --n")
        if args.family == "twist" and args.k is None:
            raise UsageError("--family twist needs --k")
        return family_polytope(args.family, args.n, args.k)
    if args.stdin:
        return CombinatorialPolytope.loads(stdin.read())
    with open(args.path) as fh:
        return CombinatorialPolytope.loads(fh.read(), name=os.path.basename(args.path))


def _read_file(path: str) -> CombinatorialPolytope:
    with open(path) as fh:
        return CombinatorialPolytope.loads(fh.read(), name=os.path.basename(path))


def _json(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _rows_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: " ".join(map(str, v)) if isinstance(v, list) else v for k, v in r.items()})
    return buf.getvalue()


def _rows_text(rows: list[dict]) -> str:
    if not rows:
        return ""
    cols = list(rows[0])

    def cell(v):
        if isinstance(v, float):
            return f"{v:.6f}"
        if isinstance(v, list):
            return "(" + ",".join(map(str, v)) + ")" if v else "-"
        return str(v)

    table = [cols] + [[cell(r[c]) for c in cols] for r in rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(cols))]
    lines = ["  ".join(x.ljust(w) for x, w in zip(row, widths)).rstrip() for row in table]
    return "\n".join(lines) + "\n"


def _polytope_output(poly: CombinatorialPolytope, fmt: str) -> str:
    if fmt == "json":
        return _json({"name": poly.name, "faces": [list(f) for f in poly.faces], "counts": list(poly.counts)})
    if fmt == "svg":
        return polytope_svg(poly)
    if fmt == "text":
        return poly.dumps()
    raise UsageError(f"format {fmt} not available for this command")


def _angles(text: str | None) -> tuple[Fraction, ...] | None:
    if text is None:
        return None
    return tuple(parse_angle(t) for t in text.split(","))


def _polygon_spec(args) -> GluingSpec:
    default = reference_polygon_gluing()
    a1, a2 = _angles(args.p1), _angles(args.p2)
    p1 = CoxeterPolygon(a1, "P1") if a1 else default.piece1
    p2 = CoxeterPolygon(a2, "P2") if a2 else default.piece2
    return GluingSpec(p1, p2, args.side1, args.side2)


def _pair_spec(args) -> GluingSpec:
    if args.what == "antiprisms":
        return antiprism_gluing(args.k, args.m)
    return GluingSpec(_read_file(args.file1), _read_file(args.file2), args.face1, args.face2)


# ---- commands ------------------------------------------------------------------------


def _cmd_gen(args, stdin):
    fmt = args.format or "text"
    if args.kind in ("antiprism", "prism"):
        if args.n is None:
            raise UsageError(f"gen {args.kind} needs n")
        poly = antiprism(args.n) if args.kind == "antiprism" else prism(args.n)
    else:
        poly = tetrahedron() if args.kind == "tetrahedron" else cube()
    return EXIT_OK, _polytope_output(poly, fmt)


def _cmd_twist(args, stdin):
    return EXIT_OK, _polytope_output(twisted_antiprism(args.n, args.k), args.format or "text")


def _polygon_result(spec: GluingSpec, fmt: str, with_glue: bool) -> tuple[int, str]:
    check = check_even_angle_interface(spec)
    if fmt == "svg":
        if not check.ok:
            raise DomainError("interface is not even-angled")
        return EXIT_OK, gluing_svg(spec)
    payload = {
        "pieces": [spec.piece1.to_dict(), spec.piece2.to_dict()],
        "interface": check.to_dict(),
    }
    code = EXIT_OK
    if check.ok:
        glued = glue_polygons(spec)
        payload["glued"] = glued.to_dict()
        payload["merged_angles"] = [format_angle(glued.angles[i]) for i in glued.marked]
        payload["area_additive"] = glued.area == spec.piece1.area + spec.piece2.area
    else:
        code = EXIT_DOMAIN
    if fmt == "text":
        lines = [f"interface ok: {check.ok}"]
        lines += [f"violation at {v.position}: {v.to_dict()['angles']} ({v.reason})" for v in check.violations]
        if check.ok:
            lines.append("glued angles: " + " ".join(payload["glued"]["angles"]))
            lines.append("merged angles: " + " ".join(payload["merged_angles"]))
            lines.append(f"area/pi: {spec.piece1.area} + {spec.piece2.area} = {payload['glued']['area_over_pi']}")
        return code, "\n".join(lines) + "\n"
    if fmt != "json":
        raise UsageError(f"format {fmt} not available for polygons")
    return code, _json(payload)


def _cmd_glue(args, stdin):
    if args.what == "polygons":
        return _polygon_result(_polygon_spec(args), args.format or "json", True)
    if args.what == "antiprisms":
        poly = glue_antiprisms(args.k, args.m)
    else:
        p1, p2 = _read_file(args.file1), _read_file(args.file2)
        poly = glue(p1, args.face1, p2, args.face2)
    return EXIT_OK, _polytope_output(poly, args.format or "text")


def _cmd_andreev(args, stdin):
    poly = _load_polytope(args, stdin)
    verdict = check_andreev(poly)
    code = EXIT_OK if verdict.ok else EXIT_DOMAIN
    fmt = args.format or "json"
    if fmt == "text":
        lines = ["ok"] if verdict.ok else [f"violation({c}) witness {list(w)}" for c, w in verdict.violations]
        return code, "\n".join(lines) + "\n"
    if fmt == "svg":
        return code, polytope_svg(poly)
    if fmt != "json":
        raise UsageError(f"format {fmt} not available for andreev")
    return code, _json({"name": poly.name, **verdict.to_dict()})


def _cmd_realize(args, stdin):
    poly = _load_polytope(args, stdin)
    solver, _ = _configs(args)
    real = realize_ideal_right_angled(poly, solver)
    fmt = args.format or "text"
    if fmt == "text":
        return EXIT_OK, real.dumps()
    if fmt == "svg":
        return EXIT_OK, polytope_svg(poly)
    if fmt != "json":
        raise UsageError(f"format {fmt} not available for realize")
    return EXIT_OK, _json({
        "name": poly.name,
        "normals": real.normals.tolist(),
        "vertex_rays": real.vertex_rays.tolist(),
        "residual": real.residual,
        "validation": validate_realization(poly, real),
    })


def _cmd_gram(args, stdin):
    poly = _load_polytope(args, stdin)
    solver, _ = _configs(args)
    g = gram(poly, realize_ideal_right_angled(poly, solver))
    fmt = args.format or "csv"
    if fmt == "csv":
        return EXIT_OK, g.to_csv()
    if fmt != "json":
        raise UsageError(f"format {fmt} not available for gram")
    return EXIT_OK, _json({"name": poly.name, "matrix": g.matrix.tolist(), "kinds": g.kinds.tolist()})


def _cmd_volume(args, stdin):
    poly = _load_polytope(args, stdin)
    solver, _ = _configs(args)
    rep = volume_ideal(poly, realize_ideal_right_angled(poly, solver))
    fmt = args.format or "json"
    if fmt == "text":
        return EXIT_OK, f"{rep.total:.15f}\n"
    if fmt != "json":
        raise UsageError(f"format {fmt} not available for volume")
    return EXIT_OK, _json({"name": poly.name, **rep.to_dict()})


def _cmd_arith(args, stdin):
    poly = _load_polytope(args, stdin)
    solver, arith = _configs(args)
    report = test_arithmetic_rightangled(gram(poly, realize_ideal_right_angled(poly, solver)), arith)
    report.name = poly.name
    code = EXIT_SOLVER if report.verdict == "inconclusive" else EXIT_OK
    fmt = args.format or "json"
    if fmt == "text":
        w = f" witness {list(report.witness.cycle)} = {report.witness.value!r}" if report.witness else ""
        return code, f"{report.verdict}{w}\n"
    if fmt != "json":
        raise UsageError(f"format {fmt} not available for arith")
    return code, _json(report.to_dict())


def _cmd_fingerprint(args, stdin):
    poly = _load_polytope(args, stdin)
    solver, arith = _configs(args)
    fp = field_fingerprint(gram(poly, realize_ideal_right_angled(poly, solver), dps=arith.dps), arith)
    fmt = args.format or "json"
    if fmt == "text":
        return EXIT_OK, "".join(" ".join(map(str, p)) + "\n" for p in fp.polynomials)
    if fmt != "json":
        raise UsageError(f"format {fmt} not available for fingerprint")
    return EXIT_OK, _json({"name": poly.name, "digest": fp.digest(), **fp.to_dict()})


def _cmd_hybrid(args, stdin):
    if args.what == "polygons":
        return _polygon_result(_polygon_spec(args), args.format or "json", True)
    spec = _pair_spec(args)
    check = check_even_angle_interface(spec)
    if not check.ok:
        return EXIT_DOMAIN, _json({"interface": check.to_dict()})
    solver, arith = _configs(args)
    rep = hybrid_from_spec(spec, solver, arith)
    fmt = args.format or "json"
    if fmt == "text":
        ev = ", ".join(rep.evidence) or "none"
        return EXIT_OK, f"{rep.verdict} (evidence: {ev})\n"
    if fmt != "json":
        raise UsageError(f"format {fmt} not available for hybrid")
    return EXIT_OK, _json(rep.to_dict())


def _cmd_links(args, stdin):
    solver, arith = _configs(args)
    rep = classify_link(LinkDescriptor(args.link_family, args.n), solver, arith)
    fmt = args.format or "json"
    if fmt == "text":
        return EXIT_OK, f"{rep.link} {rep.verdict} volume {rep.volume:.6f} class {rep.class_label}\n"
    if fmt != "json":
        raise UsageError(f"format {fmt} not available for links")
    return EXIT_OK, _json(rep.to_dict())


def _cmd_table(args, stdin):
    solver, arith = _configs(args)
    max_n = args.max_n if args.max_n is not None else DEFAULT_MAX_N[args.which]
    rows = TABLES[args.which](max_n, solver, arith)
    fmt = args.format or "text"
    if fmt == "json":
        return EXIT_OK, _json({"table": args.which, "max_n": max_n, "rows": rows})
    if fmt == "csv":
        return EXIT_OK, _rows_csv(rows)
    if fmt == "text":
        return EXIT_OK, _rows_text(rows)
    raise UsageError("format svg not available for tables")


COMMANDS = {
    "gen": _cmd_gen,
    "twist": _cmd_twist,
    "glue": _cmd_glue,
    "andreev": _cmd_andreev,
    "realize": _cmd_realize,
    "gram": _cmd_gram,
    "volume": _cmd_volume,
    "arith": _cmd_arith,
    "fingerprint": _cmd_fingerprint,
    "hybrid": _cmd_hybrid,
    "links": _cmd_links,
    "table": _cmd_table,
}


def run(argv: list[str] | None = None, stdin=None, stdout=None, stderr=None) -> int:
    """Run the CLI and return the exit code."""
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stderr(stderr), contextlib.redirect_stdout(stdout):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=stderr)
    try:
        code, text = COMMANDS[args.command](args, stdin)
    except UsageError as exc:
        parser.print_usage(stderr)
        print(f"hybridcox: error: {exc}", file=stderr)
        return EXIT_USAGE
    except (SolverError, BudgetError) as exc:
        print(f"hybridcox: {exc}", file=stderr)
        return EXIT_SOLVER
    except (DomainError, InconsistencyError, OSError) as exc:
        print(f"hybridcox: {exc}", file=stderr)
        return EXIT_DOMAIN
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
