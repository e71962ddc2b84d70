"""Even-angle gluing of Coxeter pieces and nonarithmeticity verdicts for hybrids.

Polygon angles are exact rationals: the angle ``pi * a`` is stored as the
``Fraction`` ``a``, with ``0`` for an ideal vertex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from .arithmetics import ArithmeticConfig, ArithmeticityReport, FieldFingerprint
from .combinatorics import CombinatorialPolytope, antiprism, glue, twisted_antiprism
from .errors import DomainError
from .pipeline import analyze, digest
from .realization import SolverConfig

RIGHT = Fraction(1, 2)

NONARITHMETIC = "nonarithmetic"
INCONCLUSIVE = "inconclusive"
VERDICT_MISMATCH = "verdict mismatch"
DISTINCT_FINGERPRINTS = "distinct fingerprints"

GLUING_RULE = (
    "a lattice glued along an even-angle interface from two incommensurable "
    "reflection groups is nonarithmetic"
)
LINK_AXIOM = (
    "the link group is commensurable with the reflection group of its "
    "polyhedral decomposition (taken as given, not checked)"
)


def format_angle(a: Fraction) -> str:
    """``Fraction(1, 4)`` -> ``'pi/4'``; ``0`` -> ``'0'``."""
    a = Fraction(a)
    if a == 0:
        return "0"
    num = "pi" if a.numerator == 1 else f"{a.numerator}*pi"
    return num if a.denominator == 1 else f"{num}/{a.denominator}"


def parse_angle(text: str) -> Fraction:
    """Inverse of :func:`format_angle`; also accepts a bare ``m`` for ``pi/m``."""
    t = text.strip().replace(" ", "")
    if t in ("0", "ideal", "inf"):
        return Fraction(0)
    if t.isdigit():
        return Fraction(1, int(t))
    if not t.startswith("pi") and "*pi" not in t:
        raise DomainError(f"cannot parse angle {text!r}")
    head, _, den = t.partition("/")
    num = 1 if head == "pi" else int(head.split("*")[0])
    return Fraction(num, int(den) if den else 1)


def is_submultiple(a: Fraction) -> bool:
    return a == 0 or (a.numerator == 1 and a.denominator >= 2)


def is_even(a: Fraction) -> bool:
    """True for angles ``pi/2m`` (m >= 1)."""
    return a > 0 and a.numerator == 1 and a.denominator % 2 == 0


@dataclass(frozen=True)
class CoxeterPolygon:
    """Hyperbolic polygon whose angles are ``pi/m`` or ideal (0), in cyclic order."""

    angles: tuple[Fraction, ...]
    name: str = ""
    marked: tuple[int, ...] = field(default=(), compare=False)

    def __post_init__(self):
        angles = tuple(Fraction(a) for a in self.angles)
        object.__setattr__(self, "angles", angles)
        if len(angles) < 3:
            raise DomainError("a polygon needs at least 3 sides")
        bad = [format_angle(a) for a in angles if not is_submultiple(a)]
        if bad:
            raise DomainError(f"angles {bad} are not integer submultiples of pi")
        if not sum(angles) < len(angles) - 2:
            raise DomainError(
                f"angle sum {format_angle(sum(angles))} is not below {len(angles) - 2}*pi"
            )

    @property
    def n(self) -> int:
        return len(self.angles)

    @property
    def area(self) -> Fraction:
        """Area as a multiple of pi (Gauss-Bonnet)."""
        return (self.n - 2) - sum(self.angles)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "n": self.n,
            "angles": [format_angle(a) for a in self.angles],
            "area_over_pi": str(self.area),
        }


Piece = Union[CoxeterPolygon, CombinatorialPolytope]


@dataclass(frozen=True)
class GluingSpec:
    """Two pieces and the interface along which they are glued.

    For polygons the interface is side ``i`` (from vertex ``i`` to
    ``i + 1``); the pieces lie on opposite sides, so vertex ``i`` of the
    first meets vertex ``j + 1`` of the second.  For right-angled
    polytopes the interface is a face index and ``matching`` is passed on
    to :func:`combinatorics.glue`.
    """

    piece1: Piece
    piece2: Piece
    interface1: int
    interface2: int
    matching: dict | None = None

    def __post_init__(self):
        kinds = {type(self.piece1), type(self.piece2)}
        if len(kinds) != 1 or not kinds <= {CoxeterPolygon, CombinatorialPolytope}:
            raise DomainError("both pieces must be polygons or both right-angled polytopes")
        for piece, idx in ((self.piece1, self.interface1), (self.piece2, self.interface2)):
            size = piece.n if isinstance(piece, CoxeterPolygon) else piece.num_faces
            if not 0 <= idx < size:
                raise DomainError(f"interface index {idx} out of range for {piece.name or 'piece'}")
        if self.is_polytope and len(self.piece1.faces[self.interface1]) != len(
            self.piece2.faces[self.interface2]
        ):
            raise DomainError("interface faces have different lengths")

    @property
    def is_polytope(self) -> bool:
        return isinstance(self.piece1, CombinatorialPolytope)

    def interface_angles(self) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
        """Angles the interface makes with its neighbours, position by position."""
        if self.is_polytope:
            m = len(self.piece1.faces[self.interface1])
            return (RIGHT,) * m, (RIGHT,) * m
        a, b = self.piece1.angles, self.piece2.angles
        i, j = self.interface1, self.interface2
        return (a[i], a[(i + 1) % len(a)]), (b[(j + 1) % len(b)], b[j])


@dataclass(frozen=True)
class InterfaceViolation:
    position: int
    angle1: Fraction
    angle2: Fraction
    reason: str

    def to_dict(self) -> dict:
        return {
            "position": self.position,
            "angles": [format_angle(self.angle1), format_angle(self.angle2)],
            "reason": self.reason,
        }


@dataclass(frozen=True)
class InterfaceCheck:
    violations: tuple[InterfaceViolation, ...]
    angles: tuple[tuple[Fraction, ...], tuple[Fraction, ...]] = ((), ())

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "angles": [[format_angle(a) for a in side] for side in self.angles],
            "violations": [v.to_dict() for v in self.violations],
        }


def check_even_angle_interface(spec: GluingSpec) -> InterfaceCheck:
    """Every interface angle must be ``pi/2m`` and agree across the interface."""
    left, right = spec.interface_angles()
    out = []
    for pos, (a, b) in enumerate(zip(left, right)):
        if a != b:
            out.append(InterfaceViolation(pos, a, b, "angles differ across the interface"))
        elif not is_even(a):
            out.append(InterfaceViolation(pos, a, b, "angle is not of the form pi/2m"))
    return InterfaceCheck(tuple(out), (left, right))


def glue_polygons(spec: GluingSpec) -> CoxeterPolygon:
    """Glue two Coxeter polygons along their interface side.

    The result starts at the merged image of vertex ``interface1`` of the
    first polygon, then runs through the remaining vertices of the second
    polygon, the other merged vertex, and the remaining vertices of the
    first.  ``marked`` holds the positions of the merged vertices; one
    whose merged angle is pi is dropped, its two sides becoming one.
    """
    if spec.is_polytope:
        raise DomainError("glue_polygons needs polygon pieces")
    check = check_even_angle_interface(spec)
    if not check.ok:
        raise DomainError(f"interface is not even-angled: {[v.to_dict() for v in check.violations]}")
    p, q = spec.piece1, spec.piece2
    i, j = spec.interface1, spec.interface2
    a_end = p.angles[i] + q.angles[(j + 1) % q.n]
    b_end = p.angles[(i + 1) % p.n] + q.angles[j]
    inner_q = [q.angles[(j + 2 + t) % q.n] for t in range(q.n - 2)]
    inner_p = [p.angles[(i + 2 + t) % p.n] for t in range(p.n - 2)]
    if not all(a == 1 or is_submultiple(a) for a in (a_end, b_end)):
        raise AssertionError("doubling an even angle must give a Coxeter angle")
    # a merged angle of pi (two right angles) is no vertex: its sides join
    angles: list[Fraction] = []
    marked = []
    for a, merged in [(a_end, True), *((x, False) for x in inner_q), (b_end, True), *((x, False) for x in inner_p)]:
        if merged and a == 1:
            continue
        if merged:
            marked.append(len(angles))
        angles.append(a)
    name = f"{p.name}+{q.name}" if p.name and q.name else ""
    out = CoxeterPolygon(tuple(angles), name, marked=tuple(marked))
    if out.area != p.area + q.area:
        raise AssertionError("area is not additive under gluing")
    return out


def glue_pieces(spec: GluingSpec) -> CombinatorialPolytope:
    """Glue two right-angled polytopes after checking the interface."""
    if not spec.is_polytope:
        raise DomainError("glue_pieces needs polytope pieces")
    check = check_even_angle_interface(spec)
    if not check.ok:
        raise DomainError("interface is not even-angled")
    return glue(spec.piece1, spec.interface1, spec.piece2, spec.interface2, spec.matching)


def reference_polygon_gluing() -> GluingSpec:
    """Two triangles sharing a side that meets its neighbours at pi/4 and pi/8.

    The third angles (pi/2 and pi/3) are free choices; any Coxeter values
    keeping both triangles hyperbolic work.
    """
    p1 = CoxeterPolygon((Fraction(1, 4), Fraction(1, 8), Fraction(1, 2)), "P1")
    p2 = CoxeterPolygon((Fraction(1, 8), Fraction(1, 4), Fraction(1, 3)), "P2")
    return GluingSpec(p1, p2, 0, 0)


# ---- verdicts ---------------------------------------------------------------------


@dataclass(frozen=True)
class HybridReport:
    interface: InterfaceCheck
    evidence: tuple[str, ...]
    verdict: str
    evidence_chain: tuple[dict, ...]

    def to_dict(self) -> dict:
        return {
            "interface": self.interface.to_dict(),
            "evidence": list(self.evidence) or ["none"],
            "verdict": self.verdict,
            "evidence_chain": list(self.evidence_chain),
        }


def _chain_entry(role: str, payload: dict) -> dict:
    return {"role": role, "digest": digest(payload), "payload": payload}


def hybrid_verdict(
    report_a: ArithmeticityReport,
    report_b: ArithmeticityReport,
    fp_a: FieldFingerprint | None,
    fp_b: FieldFingerprint | None,
    interface: InterfaceCheck,
) -> HybridReport:
    """Nonarithmeticity verdict for a lattice glued from pieces A and B.

    Evidence of incommensurability is either a verdict mismatch (one piece
    arithmetic, the other not) or two complete, distinct fingerprints.
    With evidence the verdict is nonarithmetic, otherwise inconclusive;
    arithmeticity of a hybrid is never claimed.
    """
    if not interface.ok:
        raise DomainError("hybrid verdict needs an even-angle interface")
    evidence = []
    if {report_a.verdict, report_b.verdict} == {"arithmetic", "nonarithmetic"}:
        evidence.append(VERDICT_MISMATCH)
    if (
        fp_a is not None
        and fp_b is not None
        and fp_a.complete
        and fp_b.complete
        and fp_a.polynomials != fp_b.polynomials
    ):
        evidence.append(DISTINCT_FINGERPRINTS)
    chain = [
        _chain_entry("interface", interface.to_dict()),
        _chain_entry("arithmeticity A", report_a.to_dict()),
        _chain_entry("arithmeticity B", report_b.to_dict()),
    ]
    if fp_a is not None:
        chain.append(_chain_entry("fingerprint A", fp_a.to_dict()))
    if fp_b is not None:
        chain.append(_chain_entry("fingerprint B", fp_b.to_dict()))
    chain.append({"role": "rule", "statement": GLUING_RULE})
    verdict = NONARITHMETIC if evidence else INCONCLUSIVE
    return HybridReport(interface, tuple(evidence), verdict, tuple(chain))


def antiprism_gluing(k: int, m: int) -> GluingSpec:
    """A_k and A_m glued along belt triangles, as in the twisted antiprism decomposition."""
    a, b = antiprism(k), antiprism(m)
    return GluingSpec(a, b, a.face_index((1, 0, k)), b.face_index((1, 0, m)), {1: 0, 0: 1, k: m})


def hybrid_from_spec(
    spec: GluingSpec,
    solver: SolverConfig | None = None,
    arith: ArithmeticConfig | None = None,
) -> HybridReport:
    """Run the full pipeline on both polytope pieces and combine the verdicts."""
    if not spec.is_polytope:
        raise DomainError("hybrid verdicts need polytope pieces")
    check = check_even_angle_interface(spec)
    glue_pieces(spec)  # the glued polytope must be well formed
    a = analyze(spec.piece1, solver, arith)
    b = analyze(spec.piece2, solver, arith)
    return hybrid_verdict(a.report, b.report, a.fingerprint, b.fingerprint, check)


# ---- link families ------------------------------------------------------------------


@dataclass(frozen=True)
class LinkDescriptor:
    """``C`` is the augmented chain-link family C_{4n+1}, ``D`` the chain links D_{2n}."""

    family: str
    n: int

    def __post_init__(self):
        if self.family not in ("C", "D"):
            raise DomainError(f"unknown link family {self.family!r}")
        lo = 2 if self.family == "C" else 3
        if not lo <= self.n <= 6:
            raise DomainError(f"link parameter n={self.n} outside {lo}..6")

    @property
    def name(self) -> str:
        return f"C_{4 * self.n + 1}" if self.family == "C" else f"D_{2 * self.n}"

    def polytope(self) -> CombinatorialPolytope:
        """The polytope two copies of which make up the complement."""
        if self.family == "C":
            return twisted_antiprism(2 * self.n, self.n + 1)
        return antiprism(self.n)

    def class_polytope(self) -> CombinatorialPolytope:
        """The antiprism whose fingerprint labels the commensurability class."""
        return antiprism(self.n + 1 if self.family == "C" else self.n)


@dataclass(frozen=True)
class LinkReport:
    link: str
    family: str
    n: int
    polytope: str
    copies: int
    volume: float
    volume_check: float
    verdict: str
    witness: dict | None
    class_label: str
    class_polynomials: tuple[tuple[int, ...], ...]
    evidence_chain: tuple[dict, ...]

    def to_dict(self) -> dict:
        return {
            "link": self.link,
            "family": self.family,
            "n": self.n,
            "polytope": self.polytope,
            "copies": self.copies,
            "volume": self.volume,
            "volume_check": self.volume_check,
            "verdict": self.verdict,
            "witness": self.witness,
            "class_label": self.class_label,
            "class_polynomials": [list(p) for p in self.class_polynomials],
            "evidence_chain": list(self.evidence_chain),
        }


def classify_link(
    d: LinkDescriptor,
    solver: SolverConfig | None = None,
    arith: ArithmeticConfig | None = None,
) -> LinkReport:
    """Volume, arithmeticity and class label of a link complement.

    The verdict is that of the reflection group of the decomposition
    polytope; the step from reflection group to link group is an axiom
    recorded in the evidence chain.
    """
    poly = d.polytope()
    main = analyze(poly, solver, arith, fingerprint=False)
    cls = analyze(d.class_polytope(), solver, arith)
    volume = 2 * main.volume.total
    # for C_{4n+1} the polytope is itself glued from two copies of A_{n+1}
    check = 2 * (2 * cls.volume.total) if d.family == "C" else 2 * cls.volume.total
    rep = main.report
    witness = None
    if rep.witness is not None:
        witness = {
            "cycle": list(rep.witness.cycle),
            "value": rep.witness.value,
            "exact": None if rep.witness.exact is None else str(rep.witness.exact),
        }
    chain = (
        _chain_entry(f"arithmeticity {poly.name}", rep.to_dict()),
        _chain_entry(f"fingerprint {cls.polytope.name}", cls.fingerprint.to_dict()),
        {"role": "axiom", "statement": LINK_AXIOM},
    )
    return LinkReport(
        d.name, d.family, d.n, poly.name, 2, volume, check, rep.verdict, witness,
        cls.fingerprint.digest(), cls.fingerprint.polynomials, chain,
    )
