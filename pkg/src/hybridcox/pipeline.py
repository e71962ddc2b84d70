"""End-to-end analysis of a single ideal right-angled polytope."""

from __future__ import annotations

import functools
import hashlib
import json
from dataclasses import dataclass

from .arithmetics import (
    ArithmeticConfig,
    ArithmeticityReport,
    FieldFingerprint,
    field_fingerprint,
    test_arithmetic_rightangled,
)
from .combinatorics import CombinatorialPolytope, antiprism, twisted_antiprism
from .invariants import GramMatrix, VolumeReport, gram, volume_ideal
from .realization import Realization, SolverConfig, realize_ideal_right_angled


@dataclass(frozen=True)
class Analysis:
    polytope: CombinatorialPolytope
    realization: Realization
    gram: GramMatrix
    report: ArithmeticityReport
    fingerprint: FieldFingerprint | None
    volume: VolumeReport


def digest(payload: dict) -> str:
    """Short SHA-256 of a JSON-serializable dict (sorted keys, compact)."""
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


@functools.lru_cache(maxsize=64)
def _analyze(text: str, name: str, solver: SolverConfig, arith: ArithmeticConfig, fp: bool) -> Analysis:
    poly = CombinatorialPolytope.loads(text, name=name)
    real = realize_ideal_right_angled(poly, solver)
    g = gram(poly, real, dps=arith.dps if fp else None)
    report = test_arithmetic_rightangled(g, arith)
    finger = field_fingerprint(g, arith) if fp else None
    return Analysis(poly, real, g, report, finger, volume_ideal(poly, real))


def analyze(
    poly: CombinatorialPolytope,
    solver: SolverConfig | None = None,
    arith: ArithmeticConfig | None = None,
    fingerprint: bool = True,
) -> Analysis:
    """Realize, build the Gram matrix, test arithmeticity and fingerprint.

    Results are memoized per polytope text and configuration.
    """
    return _analyze(poly.dumps(), poly.name, solver or SolverConfig(), arith or ArithmeticConfig(), fingerprint)


def family_polytope(family: str, n: int, k: int | None = None) -> CombinatorialPolytope:
    """Named families: ``antiprism`` (A_n) and ``twist`` (A_{n,k})."""
    if family == "antiprism":
        return antiprism(n)
    if family == "twist":
        if k is None:
            raise ValueError("the twist family needs k")
        return twisted_antiprism(n, k)
    raise ValueError(f"unknown family {family!r}")
