"""End-to-end acceptance checks.

Each test prints a single ``criterion N: PASS`` or ``criterion N: FAIL``
line (visible with ``pytest -s`` or in the tee'd log) and then asserts.
"""

import math
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from conftest import octahedron_normals
from hybridcox.arithmetics import recheck_witness
from hybridcox.combinatorics import (
    antiprism,
    check_andreev,
    cube,
    glue_antiprisms,
    is_isomorphic,
    prism,
    tetrahedron,
    twisted_antiprism,
    violates_condition,
)
from hybridcox.errors import DomainError
from hybridcox.hybrid import (
    INCONCLUSIVE,
    NONARITHMETIC,
    LinkDescriptor,
    antiprism_gluing,
    check_even_angle_interface,
    classify_link,
    reference_polygon_gluing,
    glue_polygons,
    hybrid_from_spec,
)
from hybridcox.invariants import gram, lobachevsky, volume_ideal
from hybridcox.pipeline import analyze
from hybridcox.realization import Realization, SolverConfig, realize_ideal_right_angled, vertex_rays

TESTS = Path(__file__).parent


def twist_range(max_n):
    return [(n, k) for n in range(4, max_n + 1) for k in range(3, n // 2 + 2)]


@pytest.fixture
def report(capsys):
    def emit(number: int, checks: dict[str, bool], detail: str = "") -> None:
        failed = [name for name, ok in checks.items() if not ok]
        status = "PASS" if not failed else "FAIL"
        line = f"criterion {number}: {status}"
        if failed:
            line += " (failed: " + ", ".join(failed) + ")"
        if detail:
            line += f" [{detail}]"
        with capsys.disabled():
            print("\n" + line)
        assert not failed, line

    return emit


def test_criterion_1_andreev(report):
    t0 = time.perf_counter()
    tet, tri, box = check_andreev(tetrahedron()), check_andreev(prism(3)), check_andreev(cube())
    lateral = (2, 3, 4, 5)  # the four side faces between top 0 and bottom 1
    cube_witnesses = [w for c, w in box.violations if c == 4]
    checks = {
        "tetrahedron (1)": 1 in tet.conditions(),
        "triangular prism (1)": 1 in tri.conditions(),
        "cube (4)": box.conditions() == {4},
        "cube lateral witness": any(sorted(w) == list(lateral) for w in cube_witnesses),
        "witnesses recheck": all(violates_condition(cube(), 4, w) for w in cube_witnesses),
        "antiprisms accepted": all(check_andreev(antiprism(n)).ok for n in range(3, 13)),
    }
    elapsed = time.perf_counter() - t0
    checks["runtime < 1 s"] = elapsed < 1.0
    report(1, checks, f"{elapsed:.3f} s")


def test_criterion_2_decomposition(report):
    t0 = time.perf_counter()
    pairs = twist_range(12)
    bad = [(n, k) for n, k in pairs if not is_isomorphic(twisted_antiprism(n, k), glue_antiprisms(k, n - k + 2))]
    elapsed = time.perf_counter() - t0
    report(
        2,
        {"all isomorphic": not bad, "runtime < 10 s": elapsed < 10.0},
        f"{len(pairs)} pairs, {elapsed:.2f} s" + (f", mismatches {bad}" if bad else ""),
    )


def test_criterion_3_realization(report, octahedron):
    polys = [antiprism(n) for n in range(3, 13)] + [twisted_antiprism(n, k) for n, k in twist_range(12)]
    residuals = {p.name: realize_ideal_right_angled(p).residual for p in polys}
    worst = max(residuals.values())
    hand = octahedron_normals()
    g = gram(octahedron, Realization(hand, vertex_rays(octahedron, hand), 0.0))
    rounded = np.round(g.matrix)
    solved = analyze(antiprism(3), fingerprint=False).gram.matrix
    checks = {
        "residuals <= 1e-10": worst <= 1e-10,
        "octahedron entries": set(np.unique(rounded)) == {-2.0, -1.0, 0.0, 1.0},
        "octahedron within 1e-9": float(np.max(np.abs(g.matrix - rounded))) <= 1e-9,
        "solver agrees with hand normals": set(np.unique(np.round(solved))) == {-2.0, -1.0, 0.0, 1.0}
        and float(np.max(np.abs(solved - np.round(solved)))) <= 1e-9,
    }
    report(3, checks, f"{len(polys)} polytopes, worst residual {worst:.1e}")


def test_criterion_4_volume(report):
    oracle = 4 * (2 * lobachevsky(math.pi / 4) + lobachevsky(math.pi / 2))
    vol = {}

    def volume(p):
        if p.name not in vol:
            vol[p.name] = volume_ideal(p, realize_ideal_right_angled(p)).total
        return vol[p.name]

    v3 = volume(antiprism(3))
    additivity = max(
        abs(volume(twisted_antiprism(n, k)) - volume(antiprism(k)) - volume(antiprism(n - k + 2)))
        for n, k in twist_range(10)
    )
    spread = 0.0
    for p in (antiprism(3), antiprism(6), twisted_antiprism(8, 4)):
        real = realize_ideal_right_angled(p)
        totals = []
        for apex in range(p.num_vertices):
            try:
                totals.append(volume_ideal(p, real, apex=apex).total)
            except DomainError:
                continue
        spread = max(spread, max(totals) - min(totals))
    checks = {
        "vol(A_3) = 3.663862": abs(v3 - 3.663862) <= 1e-5 and abs(v3 - oracle) <= 1e-5,
        "additivity within 1e-6": additivity <= 1e-6,
        "apex independence within 1e-8": spread <= 1e-8,
    }
    report(4, checks, f"vol(A_3)={v3:.7f}, additivity {additivity:.1e}, apex spread {spread:.1e}")


def test_criterion_5_classification(report):
    t0 = time.perf_counter()
    mismatches = []
    unsound = []

    def check(name, verdict, expected, gram_matrix=None, rep=None):
        if verdict != expected:
            mismatches.append(name)
        if verdict == "nonarithmetic" and rep is not None and not recheck_witness(gram_matrix, rep):
            unsound.append(name)

    for n in range(3, 9):
        a = analyze(antiprism(n), fingerprint=False)
        check(a.polytope.name, a.report.verdict, "arithmetic" if n in (3, 4) else "nonarithmetic", a.gram, a.report)
    for n, k in twist_range(8):
        a = analyze(twisted_antiprism(n, k), fingerprint=False)
        expected = "arithmetic" if (n, k) in ((4, 3), (6, 4)) else "nonarithmetic"
        check(a.polytope.name, a.report.verdict, expected, a.gram, a.report)
    for n in range(2, 7):
        d = LinkDescriptor("C", n)
        link = classify_link(d)
        a = analyze(d.polytope(), fingerprint=False)
        check(link.link, link.verdict, "arithmetic" if n in (2, 3) else "nonarithmetic", a.gram, a.report)
        if link.verdict == "nonarithmetic" and link.witness is None:
            unsound.append(link.link)
    elapsed = time.perf_counter() - t0
    checks = {
        "verdicts match": not mismatches,
        "witnesses recheck": not unsound,
        "runtime < 2 min": elapsed < 120,
    }
    report(5, checks, f"{elapsed:.2f} s" + (f", mismatches {mismatches}" if mismatches else ""))


def test_criterion_6_fingerprints(report):
    def fingerprints(seed):
        cfg = SolverConfig(seed=seed)
        antis = [analyze(antiprism(n), cfg).fingerprint for n in range(3, 9)]
        links = [classify_link(LinkDescriptor("C", n), cfg) for n in range(2, 7)]
        return antis, links

    antis, links = fingerprints(0)
    polys = [fp.polynomials for fp in antis]
    labels = [r.class_label for r in links]
    deterministic = True
    for seed in (1, 17):
        other_antis, other_links = fingerprints(seed)
        deterministic &= [fp.polynomials for fp in other_antis] == polys
        deterministic &= [r.class_label for r in other_links] == labels
    checks = {
        "antiprisms complete": all(fp.complete for fp in antis),
        "antiprisms pairwise distinct": len(set(polys)) == len(polys),
        "link classes pairwise distinct": len(set(labels)) == len(labels),
        "deterministic across seeds": deterministic,
    }
    report(6, checks, f"{len(polys)} antiprisms, {len(labels)} link classes")


def test_criterion_7_hybrid(report):
    spec = reference_polygon_gluing()
    interface = check_even_angle_interface(spec)
    glued = glue_polygons(spec)
    merged = tuple(glued.angles[i] for i in glued.marked)
    h35 = hybrid_from_spec(antiprism_gluing(3, 5))
    h33 = hybrid_from_spec(antiprism_gluing(3, 3))
    checks = {
        "even-angle check": interface.ok,
        "merged angles (pi/2, pi/4)": merged == (0.5, 0.25),
        "area additive": glued.area == spec.piece1.area + spec.piece2.area,
        "A_3 + A_5 nonarithmetic": h35.verdict == NONARITHMETIC,
        "A_3 + A_3 inconclusive": h33.verdict == INCONCLUSIVE,
    }
    report(7, checks, f"area {glued.area}*pi")


def test_criterion_8_property_suites(report):
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", str(TESTS / "test_properties.py")],
        capture_output=True,
        text=True,
        cwd=TESTS.parent,
    )
    summary = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr.strip()[-200:]
    report(8, {"property suites pass": proc.returncode == 0}, summary)
