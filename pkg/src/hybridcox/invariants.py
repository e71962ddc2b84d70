"""Gram matrices and volumes of ideal right-angled polyhedra."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
from scipy.special import zeta

from .combinatorics import CombinatorialPolytope
from .errors import DomainError, InconsistencyError
from .realization import Realization, lorentz_gram, refine_high_precision

ADJACENT, TANGENT, DIVERGING = 0, -1, -2
CLASS_TOL = 1e-8


@dataclass(frozen=True)
class GramMatrix:
    """Pairwise Lorentzian products of face normals.

    ``kinds[i, j]`` is ``ADJACENT`` (product 0), ``TANGENT`` (-1) or
    ``DIVERGING`` (< -1); the diagonal carries 1.
    """

    matrix: np.ndarray
    kinds: np.ndarray
    name: str = ""
    hp: tuple | None = field(default=None, compare=False, repr=False)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def to_csv(self) -> str:
        buf = io.StringIO()
        for row in self.matrix:
            buf.write(",".join(f"{x:.17g}" for x in row) + "\n")
        return buf.getvalue()


def gram(poly: CombinatorialPolytope, real: Realization, dps: int | None = None) -> GramMatrix:
    """Gram matrix of a realization, classified against the combinatorics.

    With ``dps`` set, the realization is also polished to that many digits
    and the high-precision entries are attached as ``hp``.
    """
    g = lorentz_gram(real.normals)
    if g.shape != (poly.num_faces, poly.num_faces):
        raise DomainError(f"realization has {g.shape[0]} normals for {poly.num_faces} faces")
    scale = np.sqrt(np.abs(np.diag(g)))
    g = g / np.outer(scale, scale)
    g = 0.5 * (g + g.T)
    np.fill_diagonal(g, 1.0)
    nf = poly.num_faces
    kinds = np.ones((nf, nf), dtype=int)
    for i in range(nf):
        for j in range(i + 1, nf):
            common = len(poly.face_sets[i] & poly.face_sets[j])
            kind = ADJACENT if common == 2 else TANGENT if common == 1 else DIVERGING
            x = g[i, j]
            ok = (
                abs(x) <= CLASS_TOL
                if kind == ADJACENT
                else abs(x + 1) <= CLASS_TOL
                if kind == TANGENT
                else x < -1 - CLASS_TOL
            )
            if not ok:
                raise InconsistencyError(
                    f"faces {i},{j}: product {x:.3e} inconsistent with combinatorial class {kind}"
                )
            kinds[i, j] = kinds[j, i] = kind
    hp = None
    if dps is not None:
        hp = _gram_hp(refine_high_precision(poly, real, dps), dps)
    return GramMatrix(g, kinds, poly.name, hp)


def _gram_hp(normals, dps: int) -> tuple:
    with mpmath.workdps(dps + 10):
        n = len(normals)
        out = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                a, b = normals[i], normals[j]
                out[i][j] = out[j][i] = -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
        return tuple(tuple(row) for row in out)


# ---- Lobachevsky function ------------------------------------------------------


def lobachevsky(theta: float) -> float:
    """Lobachevsky function ``-int_0^theta log|2 sin t| dt``.

    The argument is reduced to ``[-pi/2, pi/2]`` by oddness and
    pi-periodicity, then the power series

        theta * (1 - log|2 theta|) + sum_n zeta(2n) / (n (2n+1)) * (theta/pi)^(2n) * theta

    is summed until a geometric tail bound (using ``zeta(2n) <= zeta(2)``)
    drops below 1e-17.
    """
    t = math.remainder(float(theta), math.pi)
    if t == 0.0:
        return 0.0
    sign = 1.0 if t > 0 else -1.0
    t = abs(t)
    r = (t / math.pi) ** 2
    total = t * (1.0 - math.log(2.0 * t))
    power = t
    n = 0
    zeta2 = math.pi**2 / 6
    while True:
        n += 1
        power *= r
        total += zeta(2 * n) / (n * (2 * n + 1)) * power
        tail = zeta2 * power * r / ((n + 1) * (2 * n + 3) * (1 - r))
        if tail < 1e-17:
            break
    return sign * total


# ---- volume ---------------------------------------------------------------------


@dataclass(frozen=True)
class VolumeReport:
    total: float
    apex: int
    tetrahedra: tuple[tuple[int, int, int, int], ...]
    angles: tuple[tuple[float, float, float], ...]
    volumes: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "apex": self.apex,
            "tetrahedra": [
                {"vertices": list(t), "angles": list(a), "volume": v}
                for t, a, v in zip(self.tetrahedra, self.angles, self.volumes)
            ],
        }


def _stereographic(points: np.ndarray) -> np.ndarray:
    """Project unit vectors to the complex plane from a pole far from all of them."""
    cands = np.vstack([np.eye(3), -np.eye(3), np.array([[1, 2, 3]]) / math.sqrt(14)])
    cands = np.vstack([cands, -cands[-1:]])
    pole = max(cands, key=lambda c: float(np.min(np.linalg.norm(points - c, axis=1))))
    # rotate pole to +z
    z = pole / np.linalg.norm(pole)
    helper = np.array([1.0, 0, 0]) if abs(z[0]) < 0.9 else np.array([0, 1.0, 0])
    x = np.cross(helper, z)
    x /= np.linalg.norm(x)
    y = np.cross(z, x)
    p = points @ np.column_stack([x, y, z])
    return (p[:, 0] + 1j * p[:, 1]) / (1 - p[:, 2])


def ideal_tetrahedron_angles(z0: complex, z1: complex, z2: complex, z3: complex) -> tuple[float, float, float]:
    """Dihedral angles of the ideal tetrahedron with the given boundary points.

    ``z0`` is first sent to infinity by ``w = 1/(z - z0)`` (cross ratios are
    Moebius invariant); the shape parameter is then ``(w3 - w1)/(w2 - w1)``
    and the angles are the arguments of it and of ``1/(1-z)``, ``1 - 1/z``.
    """
    w1, w2, w3 = (1 / (z - z0) for z in (z1, z2, z3))
    z = (w3 - w1) / (w2 - w1)
    if abs(z.imag) < 1e-13 * max(1.0, abs(z)):
        raise DomainError("degenerate (flat) ideal tetrahedron")
    shapes = (z, 1 / (1 - z), 1 - 1 / z)
    return tuple(abs(math.atan2(s.imag, s.real)) for s in shapes)


def _cone(poly: CombinatorialPolytope, apex: int) -> list[tuple[int, int, int, int]]:
    tets = []
    for face in poly.faces:
        if apex in face:
            continue
        for i in range(1, len(face) - 1):
            tets.append((apex, face[0], face[i], face[i + 1]))
    return tets


def volume_ideal(poly: CombinatorialPolytope, real: Realization, apex: int | None = None) -> VolumeReport:
    """Volume by coning from an ideal apex vertex into ideal tetrahedra.

    If the chosen apex produces a flat tetrahedron the next vertex is tried.
    """
    if not poly.is_all_ideal:
        raise DomainError("volume_ideal requires every vertex to be ideal")
    rays = np.asarray(real.vertex_rays, dtype=float)
    pts = rays[:, 1:] / rays[:, :1]
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    zs = _stereographic(pts)
    order = range(poly.num_vertices) if apex is None else [apex]
    last_err = None
    for a in order:
        tets = _cone(poly, a)
        try:
            angles = [ideal_tetrahedron_angles(*(zs[i] for i in t)) for t in tets]
        except DomainError as exc:
            last_err = exc
            continue
        vols = [sum(lobachevsky(x) for x in ang) for ang in angles]
        return VolumeReport(float(math.fsum(vols)), a, tuple(tets), tuple(angles), tuple(vols))
    raise DomainError(f"no apex gives a nondegenerate decomposition ({last_err})")
