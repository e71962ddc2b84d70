"""Classification tables for antiprisms, twisted antiprisms and link families."""

from __future__ import annotations

from .arithmetics import ArithmeticConfig
from .combinatorics import antiprism, glue_antiprisms, is_isomorphic, twisted_antiprism
from .hybrid import LinkDescriptor, classify_link
from .pipeline import analyze
from .realization import SolverConfig


def _witness(report) -> list[int]:
    return list(report.witness.cycle) if report.witness is not None else []


def antiprism_rows(max_n: int = 8, solver: SolverConfig | None = None, arith: ArithmeticConfig | None = None) -> list[dict]:
    rows = []
    for n in range(3, max_n + 1):
        a = analyze(antiprism(n), solver, arith, fingerprint=False)
        rows.append({
            "polytope": f"A_{n}",
            "n": n,
            "verdict": a.report.verdict,
            "witness": _witness(a.report),
            "volume": a.volume.total,
        })
    return rows


def twist_rows(max_n: int = 8, solver: SolverConfig | None = None, arith: ArithmeticConfig | None = None) -> list[dict]:
    """One row per A_{n,k} with 3 <= k <= n/2 + 1 and n <= max_n."""
    rows = []
    for n in range(4, max_n + 1):
        for k in range(3, n // 2 + 2):
            m = n - k + 2
            twisted = twisted_antiprism(n, k)
            a = analyze(twisted, solver, arith, fingerprint=False)
            vk = analyze(antiprism(k), solver, arith, fingerprint=False).volume.total
            vm = analyze(antiprism(m), solver, arith, fingerprint=False).volume.total
            rows.append({
                "polytope": f"A_{n},{k}",
                "n": n,
                "k": k,
                "pieces": f"A_{k}+A_{m}",
                "isomorphic": is_isomorphic(twisted, glue_antiprisms(k, m)),
                "verdict": a.report.verdict,
                "witness": _witness(a.report),
                "volume": a.volume.total,
                "volume_pieces": vk + vm,
            })
    return rows


def link_rows(max_n: int = 6, solver: SolverConfig | None = None, arith: ArithmeticConfig | None = None) -> list[dict]:
    rows = []
    for n in range(2, max_n + 1):
        r = classify_link(LinkDescriptor("C", n), solver, arith)
        rows.append({
            "link": r.link,
            "n": n,
            "polytope": r.polytope,
            "verdict": r.verdict,
            "witness": r.witness["cycle"] if r.witness else [],
            "volume": r.volume,
            "class_label": r.class_label,
        })
    return rows


TABLES = {"antiprisms": antiprism_rows, "theorem3": twist_rows, "theorem4": link_rows}
DEFAULT_MAX_N = {"antiprisms": 8, "theorem3": 8, "theorem4": 6}
