"""Arithmeticity of ideal right-angled reflection groups from Gram data.

For a non-cocompact reflection group the ground field must be Q, and the
group is arithmetic exactly when every cyclic product of the doubled Gram
matrix ``M = 2G`` is a rational integer.  Cyclic products run over closed
walks in the graph whose edges are the nonzero off-diagonal entries; a
closed walk splits into simple cycles (length >= 3) and back-and-forth
steps (length-2 cycles ``M_ij**2``), so those are what we check.

Two routes are provided.

``method="certificate"`` (default)
    Polynomial-time and covering cycles of every length.  After checking
    the 2-cycles and the fundamental cycles of a spanning tree, the matrix
    is conjugated by a diagonal matrix into an exact rational matrix ``M'``
    with the same cyclic products.  For each prime ``p`` in a denominator,
    Bellman-Ford on the weights ``v_p(M'_ij)`` either finds a cycle with
    negative valuation (a non-integral product: the witness) or returns
    potentials that rescale ``M'`` into an integer matrix (the certificate).

``method="enumerate"``
    Depth-first enumeration of simple cycles up to ``max_len`` under a node
    budget.  Exhaustive only for small or sparse graphs.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import mpmath
import numpy as np
import sympy

from .errors import BudgetError
from .invariants import ADJACENT, GramMatrix
from .lattice import minimal_polynomial

INTEGER = "integer"
RATIONAL = "rational non-integer"
IRRATIONAL = "irrational-suspect"
AMBIGUOUS = "ambiguous"

EVIDENCE_LABEL = "separating evidence"


@dataclass(frozen=True)
class ArithmeticConfig:
    max_len: int | None = None  # None: number of faces
    budget: int = 10**7
    int_tol: float = 1e-9
    reject_tol: float = 1e-6
    max_den: int = 10**6
    method: str = "certificate"
    fingerprint_max_len: int = 3
    max_degree: int = 8
    dps: int = 80


@dataclass(frozen=True)
class CycleProduct:
    cycle: tuple[int, ...]
    value: float
    classification: str
    exact: Fraction | None = None

    def to_dict(self) -> dict:
        return {
            "cycle": list(self.cycle),
            "value": self.value,
            "classification": self.classification,
            "exact": None if self.exact is None else str(self.exact),
        }


@dataclass
class ArithmeticityReport:
    verdict: str  # arithmetic | nonarithmetic | inconclusive
    method: str
    witness: CycleProduct | None
    max_len: int
    cycles_checked: int
    tolerance: float
    coverage: str
    certificate: dict = field(default_factory=dict)
    name: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "verdict": self.verdict,
            "method": self.method,
            "witness_cycle": list(self.witness.cycle) if self.witness else [],
            "witness_value": self.witness.value if self.witness else None,
            "witness_exact": (
                str(self.witness.exact) if self.witness and self.witness.exact is not None else None
            ),
            "max_len": self.max_len,
            "cycles_checked": self.cycles_checked,
            "tolerance": self.tolerance,
            "coverage": self.coverage,
        }


# ---- numeric-to-exact bridge -----------------------------------------------------


def rational_detect(
    x: float, tol: float = 1e-9, max_den: int = 10**6, significance: float = 1e-3
) -> Fraction | None:
    """First continued-fraction convergent ``p/q`` (``q <= max_den``) within ``tol`` of ``x``.

    ``tol`` is relative to ``max(1, |x|)``.  A convergent is only accepted
    if it is a markedly better approximation than continued fractions give
    any real number, i.e. ``|x - p/q| * q**2 <= significance``; without
    this, every irrational has convergents with ``q`` around ``1e5``
    inside ``1e-10``.
    """
    x = float(x)
    if not math.isfinite(x):
        return None
    bound = tol * max(1.0, abs(x))
    h0, h1 = 0, 1
    k0, k1 = 1, 0
    rest = Fraction(x)
    for _ in range(64):
        a = math.floor(rest)
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        if k1 > max_den:
            return None
        err = abs(x - h1 / k1)
        if err <= bound and (k1 == 1 or err * k1 * k1 <= significance):
            return Fraction(h1, k1)
        frac = rest - a
        if frac == 0:
            return None
        rest = 1 / frac
    return None


def classify_value(x: float, cfg: ArithmeticConfig = ArithmeticConfig()) -> tuple[str, Fraction | None]:
    """Integer / rational / irrational classification with an abstention band."""
    scale = max(1.0, abs(x))
    dist = abs(x - round(x)) / scale
    if dist <= cfg.int_tol:
        return INTEGER, Fraction(round(x))
    if dist < cfg.reject_tol:
        return AMBIGUOUS, None
    q = rational_detect(x, cfg.int_tol, cfg.max_den)
    if q is not None:
        return RATIONAL, q
    return IRRATIONAL, None


def _as_matrix(g: GramMatrix | np.ndarray) -> np.ndarray:
    return np.asarray(g.matrix if isinstance(g, GramMatrix) else g, dtype=float)


def _support(g: GramMatrix | np.ndarray) -> list[list[int]]:
    """Neighbour lists of the nonzero-entry graph."""
    if isinstance(g, GramMatrix):
        nz = (g.kinds != ADJACENT) & ~np.eye(g.size, dtype=bool)
    else:
        m = _as_matrix(g)
        nz = (np.abs(m) > 1e-8) & ~np.eye(len(m), dtype=bool)
    return [[int(j) for j in np.flatnonzero(row)] for row in nz]


def cycle_value(g: GramMatrix | np.ndarray, cycle: Sequence[int]) -> float:
    """Product of ``2 * G`` around a cycle (a 2-cycle gives ``4 G_ij**2``)."""
    m = _as_matrix(g)
    return float(np.prod([2.0 * m[cycle[i], cycle[(i + 1) % len(cycle)]] for i in range(len(cycle))]))


def cycle_value_hp(g: GramMatrix, cycle: Sequence[int]):
    if g.hp is None:
        return mpmath.mpf(cycle_value(g, cycle))
    out = mpmath.mpf(1)
    for i in range(len(cycle)):
        out *= 2 * g.hp[cycle[i]][cycle[(i + 1) % len(cycle)]]
    return out


# ---- enumeration -------------------------------------------------------------------


def iter_cycles(
    g: GramMatrix | np.ndarray, max_len: int, budget: int = 10**7, counter: list | None = None
) -> Iterator[tuple[int, ...]]:
    """Simple cycles of length 3..max_len through nonzero entries.

    Each cycle is produced once: rooted at its smallest vertex, with the
    second vertex smaller than the last.  Raises BudgetError after
    ``budget`` search nodes.
    """
    adj = _support(g)
    visited = [0] if counter is None else counter
    for root in range(len(adj)):
        path = [root]
        on_path = {root}
        stack = [iter(n for n in adj[root] if n > root)]
        while stack:
            nxt = next(stack[-1], None)
            if nxt is None:
                stack.pop()
                on_path.discard(path.pop())
                continue
            visited[0] += 1
            if visited[0] > budget:
                raise BudgetError(f"cycle search exceeded {budget} nodes", visited=visited[0])
            if len(path) >= 2 and root in adj[nxt] and path[1] < nxt and len(path) + 1 >= 3:
                yield tuple(path) + (nxt,)
            if len(path) + 1 < max_len:
                path.append(nxt)
                on_path.add(nxt)
                stack.append(iter(n for n in adj[nxt] if n > root and n not in on_path))


def cycle_products(
    g: GramMatrix | np.ndarray, max_len: int, budget: int = 10**7, cfg: ArithmeticConfig = ArithmeticConfig()
) -> list[CycleProduct]:
    """All simple-cycle products of length 3..max_len, classified."""
    out = []
    try:
        for cyc in iter_cycles(g, max_len, budget):
            v = cycle_value(g, cyc)
            cls, exact = classify_value(v, cfg)
            out.append(CycleProduct(cyc, v, cls, exact))
    except BudgetError as exc:
        exc.partial = out
        raise
    return out


def _two_cycles(adj: list[list[int]]) -> list[tuple[int, int]]:
    return [(i, j) for i in range(len(adj)) for j in adj[i] if i < j]


# ---- the arithmeticity test -----------------------------------------------------------


def test_arithmetic_rightangled(
    g: GramMatrix | np.ndarray, cfg: ArithmeticConfig = ArithmeticConfig()
) -> ArithmeticityReport:
    """Decide arithmeticity of the reflection group with Gram matrix ``g``."""
    if cfg.method == "enumerate":
        return _test_by_enumeration(g, cfg)
    if cfg.method != "certificate":
        raise ValueError(f"unknown method {cfg.method!r}")
    return _test_by_certificate(g, cfg)


test_arithmetic_rightangled.__test__ = False  # not a pytest test


def _report(verdict, method, witness, n, checked, cfg, coverage, cert=None, name=""):
    return ArithmeticityReport(
        verdict, method, witness, n, checked, cfg.int_tol, coverage, cert or {}, name
    )


def _test_by_enumeration(g, cfg: ArithmeticConfig) -> ArithmeticityReport:
    n = g.size if isinstance(g, GramMatrix) else len(g)
    name = getattr(g, "name", "")
    max_len = cfg.max_len or n
    adj = _support(g)
    checked = 0
    ambiguous = None
    counter = [0]
    try:
        for cyc in itertools.chain(_two_cycles(adj), iter_cycles(g, max_len, cfg.budget, counter)):
            checked += 1
            v = cycle_value(g, cyc)
            cls, exact = classify_value(v, cfg)
            if cls in (RATIONAL, IRRATIONAL):
                return _report(
                    "nonarithmetic", "enumerate", CycleProduct(tuple(cyc), v, cls, exact),
                    max_len, checked, cfg, f"stopped at first non-integral cycle after {checked}", name=name,
                )
            if cls == AMBIGUOUS and ambiguous is None:
                ambiguous = CycleProduct(tuple(cyc), v, cls)
    except BudgetError:
        return _report(
            "inconclusive", "enumerate", None, max_len, checked, cfg,
            f"budget of {cfg.budget} nodes exhausted after {checked} integral cycles", name=name,
        )
    if ambiguous is not None:
        return _report(
            "inconclusive", "enumerate", ambiguous, max_len, checked, cfg,
            "a cycle product lies in the abstention band", name=name,
        )
    return _report(
        "arithmetic", "enumerate", None, max_len, checked, cfg,
        f"exhaustive: all {checked} cycles of length 2..{max_len} integral", name=name,
    )


def _spanning_forest(adj: list[list[int]]) -> tuple[dict[int, int | None], dict[int, int]]:
    parent: dict[int, int | None] = {}
    depth: dict[int, int] = {}
    for root in range(len(adj)):
        if root in parent:
            continue
        parent[root], depth[root] = None, 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if v not in parent:
                    parent[v], depth[v] = u, depth[u] + 1
                    queue.append(v)
    return parent, depth


def _tree_paths(parent, depth, i: int, j: int) -> tuple[list[int], list[int]]:
    """Tree paths from the lowest common ancestor down to ``i`` and to ``j``."""
    pi, pj = [i], [j]
    while depth[pi[-1]] > depth[pj[-1]]:
        pi.append(parent[pi[-1]])
    while depth[pj[-1]] > depth[pi[-1]]:
        pj.append(parent[pj[-1]])
    while pi[-1] != pj[-1]:
        pi.append(parent[pi[-1]])
        pj.append(parent[pj[-1]])
    return pi[::-1], pj[::-1]


def _valuation(x: Fraction, p: int) -> int:
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def _negative_cycle(nodes: int, weights: dict[tuple[int, int], int]) -> tuple[list[int] | None, list[int]]:
    """Bellman-Ford from a virtual source; returns (cycle or None, potentials)."""
    dist = [0] * nodes
    pred = [-1] * nodes
    last = -1
    for _ in range(nodes + 1):
        last = -1
        for (u, v), w in weights.items():
            if dist[u] + w < dist[v]:
                dist[v] = dist[u] + w
                pred[v] = u
                last = v
        if last == -1:
            return None, dist
    x = last
    for _ in range(nodes):
        x = pred[x]
    cyc = [x]
    y = pred[x]
    while y != x:
        cyc.append(y)
        y = pred[y]
    return cyc[::-1], dist


def _test_by_certificate(g, cfg: ArithmeticConfig) -> ArithmeticityReport:
    n = g.size if isinstance(g, GramMatrix) else len(g)
    name = getattr(g, "name", "")
    adj = _support(g)
    checked = 0
    ambiguous: CycleProduct | None = None

    def fail(cyc, v, cls, exact, why):
        return _report(
            "nonarithmetic", "certificate", CycleProduct(tuple(cyc), v, cls, exact),
            n, checked, cfg, why, name=name,
        )

    # 2-cycles
    square: dict[tuple[int, int], int] = {}
    for i, j in _two_cycles(adj):
        checked += 1
        v = cycle_value(g, (i, j))
        cls, exact = classify_value(v, cfg)
        if cls in (RATIONAL, IRRATIONAL):
            return fail((i, j), v, cls, exact, "non-integral 2-cycle (squared entry)")
        if cls == AMBIGUOUS:
            ambiguous = ambiguous or CycleProduct((i, j), v, cls)
            continue
        square[(i, j)] = square[(j, i)] = int(exact)

    parent, depth = _spanning_forest(adj)
    tree = {(u, p) for u, p in parent.items() if p is not None}
    tree |= {(p, u) for u, p in tree}
    # conjugated matrix M' on directed edges; tree edges parent->child are 1
    mprime: dict[tuple[int, int], Fraction] = {}
    fundamental: list[tuple[tuple[int, ...], float]] = []
    for (u, p) in [(u, p) for u, p in parent.items() if p is not None]:
        mprime[(p, u)] = Fraction(1)
        if (p, u) in square:
            mprime[(u, p)] = Fraction(square[(p, u)])
    for i, j in _two_cycles(adj):
        if (i, j) in tree:
            continue
        down_i, down_j = _tree_paths(parent, depth, i, j)
        cyc = down_i + down_j[:0:-1]  # lca .. i, j .. (child of lca)
        checked += 1
        v = cycle_value(g, cyc)
        cls, exact = classify_value(v, cfg)
        if cls in (RATIONAL, IRRATIONAL):
            return fail(cyc, v, cls, exact, "non-integral fundamental cycle")
        if cls == AMBIGUOUS or any(
            (a, b) not in square for a, b in zip(down_j, down_j[1:])
        ):
            ambiguous = ambiguous or CycleProduct(tuple(cyc), v, AMBIGUOUS)
            continue
        fundamental.append((tuple(cyc), v))
        denom = math.prod(square[(a, b)] for a, b in zip(down_j, down_j[1:]))
        mprime[(i, j)] = exact / denom
        mprime[(j, i)] = Fraction(square[(i, j)]) / mprime[(i, j)]
    if ambiguous is not None:
        return _report(
            "inconclusive", "certificate", ambiguous, n, checked, cfg,
            "a cycle product lies in the abstention band or could not be resolved", name=name,
        )

    primes: set[int] = set()
    for x in mprime.values():
        primes |= set(sympy.factorint(x.denominator))
    scaling_exponents: dict[int, list[int]] = {}
    for p in sorted(primes):
        weights = {e: _valuation(x, p) for e, x in mprime.items()}
        cyc, dist = _negative_cycle(n, weights)
        if cyc is not None:
            exact = math.prod((mprime[(cyc[k], cyc[(k + 1) % len(cyc)])] for k in range(len(cyc))), start=Fraction(1))
            v = cycle_value(g, cyc)
            return fail(cyc, v, RATIONAL, exact, f"cycle with negative {p}-adic valuation")
        scaling_exponents[p] = dist
    # integral representative N = S M' S^-1 with S = diag(prod p^dist)
    scale = [
        math.prod((Fraction(p) ** d[v] for p, d in scaling_exponents.items()), start=Fraction(1))
        for v in range(n)
    ]
    integral = {(u, v): scale[u] * x / scale[v] for (u, v), x in mprime.items()}
    assert all(x.denominator == 1 for x in integral.values())
    cert = {
        "integral_entries": {f"{u},{v}": int(x) for (u, v), x in sorted(integral.items())},
        "fundamental_cycles": [list(c) for c, _ in fundamental],
        "primes": sorted(primes),
    }
    return _report(
        "arithmetic", "certificate", None, n, checked, cfg,
        "all cycle lengths: 2-cycles and fundamental cycles integral/rational, "
        "p-adic potentials give an integral diagonal conjugate",
        cert, name,
    )


# ---- re-checking -------------------------------------------------------------------


def recheck_witness(g: GramMatrix | np.ndarray, report: ArithmeticityReport, cfg: ArithmeticConfig = ArithmeticConfig()) -> bool:
    """Recompute a nonarithmetic witness from ``g`` and confirm it is non-integral."""
    if report.verdict != "nonarithmetic" or report.witness is None:
        return False
    cyc = report.witness.cycle
    adj = _support(g)
    n = len(cyc)
    if len(set(cyc)) != n or n < 2:
        return False
    if any(cyc[(k + 1) % n] not in adj[cyc[k]] for k in range(n)):
        return False
    v = cycle_value(g, cyc)
    return abs(v - round(v)) >= cfg.reject_tol * max(1.0, abs(v))


def recheck_certificate(g: GramMatrix, report: ArithmeticityReport, cfg: ArithmeticConfig = ArithmeticConfig()) -> bool:
    """Confirm an arithmetic certificate: the integer matrix has the same
    2-cycle and fundamental-cycle products as ``2G``, hence the same cyclic
    products, all of which are then integers."""
    cert = report.certificate
    if report.verdict != "arithmetic" or "integral_entries" not in cert:
        return False
    ent = {tuple(map(int, k.split(","))): v for k, v in cert["integral_entries"].items()}
    adj = _support(g)
    for i, j in _two_cycles(adj):
        v = cycle_value(g, (i, j))
        if abs(ent[(i, j)] * ent[(j, i)] - v) > cfg.int_tol * max(1.0, abs(v)) * 10:
            return False
    for cyc in cert["fundamental_cycles"]:
        v = cycle_value(g, cyc)
        prod = math.prod(ent[(cyc[k], cyc[(k + 1) % len(cyc)])] for k in range(len(cyc)))
        if abs(prod - v) > cfg.int_tol * max(1.0, abs(v)) * 10:
            return False
    # the fundamental cycles must span the cycle space
    edges = len(_two_cycles(adj))
    nodes = len(adj)
    components = len({min(_component(adj, v)) for v in range(nodes)})
    return len(cert["fundamental_cycles"]) == edges - nodes + components


def _component(adj, start):
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


# ---- field fingerprints ------------------------------------------------------------------


@dataclass(frozen=True)
class FieldFingerprint:
    polynomials: tuple[tuple[int, ...], ...]
    unresolved: int = 0
    values: int = 0
    max_len: int = 3

    @property
    def partial(self) -> bool:
        return self.unresolved > 0

    @property
    def complete(self) -> bool:
        return not self.partial

    def to_dict(self) -> dict:
        return {
            "polynomials": [list(p) for p in self.polynomials],
            "partial": self.partial,
            "unresolved": self.unresolved,
            "label": EVIDENCE_LABEL,
        }

    def digest(self) -> str:
        import hashlib

        return hashlib.sha256(repr(self.polynomials).encode()).hexdigest()[:16]


def field_fingerprint(g: GramMatrix, cfg: ArithmeticConfig = ArithmeticConfig()) -> FieldFingerprint:
    """Sorted minimal polynomials of the distinct short cycle products.

    Fingerprints separate reflection groups as evidence only; equal
    fingerprints prove nothing and distinct ones do not decide field
    equality.
    """
    cycles = list(iter_cycles(g, cfg.fingerprint_max_len, cfg.budget))
    distinct: list[tuple[float, tuple[int, ...]]] = []
    for cyc in cycles:
        v = cycle_value(g, cyc)
        if all(abs(v - w) > 1e-9 * max(1.0, abs(v)) for w, _ in distinct):
            distinct.append((v, cyc))
    dps = cfg.dps if g.hp is not None else 15
    polys = []
    unresolved = 0
    for _, cyc in sorted(distinct):
        with mpmath.workdps(dps + 10):
            val = cycle_value_hp(g, cyc)
        poly = minimal_polynomial(val, cfg.max_degree, dps)
        if poly is None:
            unresolved += 1
        else:
            polys.append(poly)
    polys.sort(key=lambda p: (len(p), p))
    return FieldFingerprint(tuple(polys), unresolved, len(distinct), cfg.fingerprint_max_len)
