"""Ideal right-angled polyhedra as unit spacelike normals in Minkowski space R^{3,1}.

Each face gets an outward unit normal ``e`` with ``(e, e) = 1``; the
polyhedron is ``{x : (x, e_f) <= 0 for all faces f}`` on the upper sheet.
The constraint system solved here is

* ``(e_f, e_f) = 1`` for every face,
* ``(e_f, e_g) = 0`` for faces sharing an edge (right angles),
* ``(e_f, e_g) = -1`` for the two opposite face pairs at every 4-valent
  ideal vertex (the planes are tangent at infinity).

Vertex rays are recovered afterwards as ``e_a + e_c`` for an opposite pair,
which is lightlike and orthogonal to all four faces at the vertex.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .combinatorics import CombinatorialPolytope, check_andreev
from .errors import DomainError, SolverError

log = logging.getLogger(__name__)

MINKOWSKI = np.diag([-1.0, 1.0, 1.0, 1.0])


def lorentz_dot(x, y) -> float | np.ndarray:
    """``-x0*y0 + x1*y1 + x2*y2 + x3*y3`` (broadcasts over leading axes)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return -x[..., 0] * y[..., 0] + np.sum(x[..., 1:] * y[..., 1:], axis=-1)


def lorentz_gram(vectors: np.ndarray) -> np.ndarray:
    """All pairwise products of the rows of ``vectors``."""
    v = np.asarray(vectors, dtype=float)
    return v @ MINKOWSKI @ v.T


def classify_vector(x, tol: float = 1e-10) -> str:
    q = float(lorentz_dot(x, x))
    if q > tol:
        return "spacelike"
    if q < -tol:
        return "timelike"
    return "lightlike"


@dataclass(frozen=True)
class SolverConfig:
    tolerance: float = 1e-10
    max_iterations: int = 200
    seed: int = 0
    restarts: int = 5

    def __post_init__(self):
        if not self.tolerance > 0:
            raise DomainError("solver tolerance must be positive")
        if self.max_iterations < 1:
            raise DomainError("max_iterations must be >= 1")


@dataclass(frozen=True)
class Realization:
    normals: np.ndarray  # (F, 4)
    vertex_rays: np.ndarray  # (V, 4), x0 = 1
    residual: float
    iterations: int = 0
    restarts_used: int = 0
    meta: dict = field(default_factory=dict, compare=False)

    def dumps(self) -> str:
        lines = ["realization v1"]
        for i, e in enumerate(self.normals):
            lines.append(f"f {i} " + " ".join(f"{x:.17g}" for x in e))
        for i, v in enumerate(self.vertex_rays):
            lines.append(f"v {i} " + " ".join(f"{x:.17g}" for x in v))
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "Realization":
        lines = [ln.split() for ln in text.splitlines() if ln.strip()]
        if not lines or " ".join(lines[0]) != "realization v1":
            raise DomainError("expected header 'realization v1'")
        faces, verts = {}, {}
        for toks in lines[1:]:
            if len(toks) != 6 or toks[0] not in ("f", "v"):
                raise DomainError(f"malformed realization line: {' '.join(toks)}")
            target = faces if toks[0] == "f" else verts
            target[int(toks[1])] = [float(t) for t in toks[2:]]
        normals = np.array([faces[i] for i in range(len(faces))])
        rays = np.array([verts[i] for i in range(len(verts))]) if verts else np.zeros((0, 4))
        return cls(normals, rays, float("nan"))


# ---- constraint system -----------------------------------------------------------


def constraint_pairs(poly: CombinatorialPolytope) -> tuple[np.ndarray, np.ndarray]:
    """Index pairs ``(i, j)`` and target products for every constraint."""
    pairs = [(f, f) for f in range(poly.num_faces)]
    targets = [1.0] * poly.num_faces
    for f, g in poly.edge_faces.values():
        pairs.append((min(f, g), max(f, g)))
        targets.append(0.0)
    tangent = set()
    for v in range(poly.num_vertices):
        for f, g in poly.opposite_face_pairs(v):
            tangent.add((min(f, g), max(f, g)))
    for p in sorted(tangent):
        pairs.append(p)
        targets.append(-1.0)
    return np.array(pairs, dtype=int), np.array(targets)


def _residual(x: np.ndarray, pairs: np.ndarray, targets: np.ndarray) -> np.ndarray:
    e = x.reshape(-1, 4)
    return lorentz_dot(e[pairs[:, 0]], e[pairs[:, 1]]) - targets


def _jacobian(x: np.ndarray, pairs: np.ndarray) -> np.ndarray:
    e = x.reshape(-1, 4)
    je = e @ MINKOWSKI
    jac = np.zeros((len(pairs), x.size))
    rows = np.arange(len(pairs))
    for c in range(4):
        np.add.at(jac, (rows, 4 * pairs[:, 0] + c), je[pairs[:, 1], c])
        np.add.at(jac, (rows, 4 * pairs[:, 1] + c), je[pairs[:, 0], c])
    return jac


def _newton(x, pairs, targets, tol, max_iter):
    """Damped Gauss-Newton with minimum-norm least-squares steps."""
    r = _residual(x, pairs, targets)
    best = np.max(np.abs(r))
    for it in range(1, max_iter + 1):
        if best <= tol:
            return x, best, it - 1
        jac = _jacobian(x, pairs)
        step, *_ = np.linalg.lstsq(jac, -r, rcond=1e-12)
        norm0 = np.linalg.norm(r)
        t = 1.0
        while t > 1e-6:
            xn = x + t * step
            rn = _residual(xn, pairs, targets)
            if np.linalg.norm(rn) < norm0:
                break
            t *= 0.5
        else:
            break
        x, r = xn, rn
        best = np.max(np.abs(r))
    return x, best, max_iter


# ---- initial guess -------------------------------------------------------------


def _sphere_layout(poly: CombinatorialPolytope, rng: np.random.Generator | None) -> np.ndarray:
    """Planar Tutte embedding of the face-adjacency graph, lifted to the sphere.

    The faces around vertex 0 are pinned on a circle, the rest solve the
    barycentric (Laplace) system, and the disk is mapped to the sphere by
    inverse stereographic projection; a short spring relaxation evens out
    the spacing.
    """
    nf = poly.num_faces
    outer = list(poly.vertex_cycle(0))
    pos2 = np.zeros((nf, 2))
    ang = 2 * np.pi * np.arange(len(outer)) / len(outer)
    pos2[outer] = np.column_stack([np.cos(ang), np.sin(ang)])
    inner = [f for f in range(nf) if f not in outer]
    lap = np.zeros((nf, nf))
    for f, g in poly.edge_faces.values():
        lap[f, g] = lap[g, f] = -1.0
    lap[np.diag_indices(nf)] = -lap.sum(axis=1)
    a = lap[np.ix_(inner, inner)]
    b = -lap[np.ix_(inner, outer)] @ pos2[outer]
    pos2[inner] = np.linalg.solve(a, b)
    pos2 *= 2.0
    r2 = np.sum(pos2**2, axis=1, keepdims=True)
    pos = np.column_stack([2 * pos2, r2[:, 0] - 1]) / (1 + r2)
    if rng is not None:
        pos += 0.15 * rng.standard_normal(pos.shape)
        pos /= np.linalg.norm(pos, axis=1, keepdims=True)
    adj = [sorted(x) for x in poly.face_adjacency]
    deg = np.array([len(x) for x in adj])[:, None]
    for _ in range(200):
        diff = pos[:, None, :] - pos[None, :, :]
        d2 = np.sum(diff**2, axis=-1) + np.eye(nf)
        repulse = np.sum(diff / d2[..., None], axis=1) / nf
        attract = np.array([pos[x].sum(axis=0) for x in adj]) / deg - pos
        pos = pos + 0.2 * (attract + repulse)
        pos /= np.linalg.norm(pos, axis=1, keepdims=True)
    return pos


def initial_normals(poly: CombinatorialPolytope, rng: np.random.Generator | None = None) -> np.ndarray:
    """Circle-pattern guess: face f becomes the plane through a spherical cap.

    A cap with centre ``c`` and angular radius ``r`` corresponds to the unit
    spacelike vector ``(cos r, c) / sin r``.  Radii are chosen so that caps
    of adjacent faces are close to orthogonal.
    """
    pos = _sphere_layout(poly, rng)
    radii = np.empty(poly.num_faces)
    for f, nbrs in enumerate(poly.face_adjacency):
        cos_theta = np.clip([pos[f] @ pos[g] for g in nbrs], 1e-3, 0.999)
        radii[f] = np.arccos(np.sqrt(np.mean(cos_theta)))
    return np.column_stack([np.cos(radii), pos]) / np.sin(radii)[:, None]


# ---- post-processing -----------------------------------------------------------


def vertex_rays(poly: CombinatorialPolytope, normals: np.ndarray) -> np.ndarray:
    """Lightlike rays at ideal vertices, normalized to ``x0 = 1``."""
    rays = np.zeros((poly.num_vertices, 4))
    for v in range(poly.num_vertices):
        pairs = poly.opposite_face_pairs(v)
        if not pairs:
            raise DomainError(f"vertex {v} is not 4-valent")
        a, c = pairs[0]
        ray = normals[a] + normals[c]
        ray = ray if ray[0] > 0 else -ray
        rays[v] = ray / ray[0]
    return rays


def _orient_outward(poly: CombinatorialPolytope, normals: np.ndarray) -> np.ndarray:
    rays = vertex_rays(poly, normals)
    total = 0.0
    for v, ray in enumerate(rays):
        others = [f for f in range(poly.num_faces) if f not in poly.vertex_faces[v]]
        total += float(np.sum(lorentz_dot(normals[others], ray)))
    return -normals if total > 0 else normals


def convexity_defect(poly: CombinatorialPolytope, normals: np.ndarray) -> float:
    """Worst violation of strict convexity; negative for a genuine realization.

    Checks that every ideal vertex lies strictly inside each face plane it
    is not on, and that combinatorially disjoint faces have ultraparallel
    planes.  Spurious solutions of the constraint system (folded faces,
    multiple covers of a smaller polyhedron) fail here.
    """
    rays = vertex_rays(poly, normals)
    worst = -np.inf
    for v, ray in enumerate(rays):
        others = [f for f in range(poly.num_faces) if f not in poly.vertex_faces[v]]
        scale = np.linalg.norm(normals[others], axis=1) * np.linalg.norm(ray)
        worst = max(worst, float(np.max(lorentz_dot(normals[others], ray) / scale)))
    g = lorentz_gram(normals)
    for i in range(poly.num_faces):
        for j in range(i + 1, poly.num_faces):
            if not poly.faces_meet(i, j):
                # disjoint faces must have ultraparallel planes
                worst = max(worst, g[i, j] + 1.0)
    return worst


def boost(phi: float) -> np.ndarray:
    """Lorentz boost along the x1 axis."""
    m = np.eye(4)
    m[0, 0] = m[1, 1] = np.cosh(phi)
    m[0, 1] = m[1, 0] = -np.sinh(phi)
    return m


def canonical_gauge(poly: CombinatorialPolytope, normals: np.ndarray) -> np.ndarray:
    """Lorentz transformation pinning all isometry freedom.

    Face 0 goes to ``(0,0,0,1)``; its lowest-numbered neighbour to
    ``(0,0,1,0)``; the two ideal ends of their common edge to the rays of
    ``(1, +-1, 0, 0)``; and a third vertex of that neighbour gets ``x1 = 0``.
    """
    f0 = 0
    f1 = min(poly.face_adjacency[f0])
    u, v = poly.shared_edge(f0, f1)
    rays = vertex_rays(poly, normals)
    ru, rv = rays[u], rays[v]
    scale = np.sqrt(-2.0 * lorentz_dot(ru, rv))
    ru, rv = ru / scale, rv / scale
    frame = np.column_stack([ru + rv, ru - rv, normals[f1], normals[f0]])
    lt = np.linalg.inv(frame)
    w = next(x for x in poly.faces[f1] if x not in (u, v))
    rw = lt @ rays[w]
    lt = boost(np.arctanh(rw[1] / rw[0])) @ lt
    return lt


def realize_ideal_right_angled(
    poly: CombinatorialPolytope, cfg: SolverConfig | None = None
) -> Realization:
    """Solve for the ideal right-angled realization of ``poly``."""
    cfg = cfg or SolverConfig()
    verdict = check_andreev(poly)
    if not verdict.ok:
        raise DomainError(f"polytope fails Andreev's conditions: {verdict.violations[:3]}")
    if not poly.is_all_ideal:
        raise DomainError("only all-ideal (4-valent) polytopes are supported")
    pairs, targets = constraint_pairs(poly)
    rng = np.random.default_rng(cfg.seed)
    best = (np.inf, None, 0)
    for attempt in range(cfg.restarts + 1):
        x0 = initial_normals(poly, None if attempt == 0 else rng).ravel()
        x, res, iters = _newton(x0, pairs, targets, cfg.tolerance, cfg.max_iterations)
        if res <= cfg.tolerance:
            x = _orient_outward(poly, x.reshape(-1, 4)).ravel()
            if convexity_defect(poly, x.reshape(-1, 4)) > -1e-9:
                log.debug("attempt %d converged to a non-convex solution", attempt)
                res = np.inf
        log.debug("realize %s attempt %d: residual %.3e after %d its", poly.name, attempt, res, iters)
        if res < best[0]:
            best = (res, x, iters)
        if res <= cfg.tolerance:
            break
    res, x, iters = best
    if not res <= cfg.tolerance:
        raise SolverError(f"no convergence for {poly.name or 'polytope'}: residual {res:.3e}", res)
    normals = x.reshape(-1, 4)
    lt = canonical_gauge(poly, normals)
    normals = normals @ lt.T
    # polish once more in the final gauge
    xf, res2, _ = _newton(normals.ravel(), pairs, targets, cfg.tolerance * 1e-3, 3)
    if res2 <= res:
        normals, res = xf.reshape(-1, 4), res2
    rays = vertex_rays(poly, normals)
    return Realization(normals, rays, float(res), iters, attempt, {"polytope": poly.name})


# ---- independent validation ------------------------------------------------------


def validate_realization(poly: CombinatorialPolytope, real: Realization) -> dict[str, float]:
    """Recompute every constraint class directly from the definitions.

    Returns the maximum violation per class.  Shares no code with the solver
    apart from the bilinear form.
    """
    normals = np.asarray(real.normals, dtype=float)
    rays = np.asarray(real.vertex_rays, dtype=float)
    if normals.shape != (poly.num_faces, 4):
        raise DomainError(f"expected {poly.num_faces} normals, got shape {normals.shape}")
    if rays.shape != (poly.num_vertices, 4):
        raise DomainError(f"expected {poly.num_vertices} vertex rays, got shape {rays.shape}")

    def dot(a, b):
        return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]

    unit = max(abs(dot(e, e) - 1.0) for e in normals)
    adjacency = 0.0
    for i in range(poly.num_faces):
        for j in range(i + 1, poly.num_faces):
            common = set(poly.faces[i]) & set(poly.faces[j])
            if len(common) == 2:
                adjacency = max(adjacency, abs(dot(normals[i], normals[j])))
    tangency = 0.0
    incidence = 0.0
    lightlike = 0.0
    future = 0.0
    convexity = 0.0
    for v in range(poly.num_vertices):
        ray = rays[v] / np.linalg.norm(rays[v])
        lightlike = max(lightlike, abs(dot(ray, ray)))
        future = max(future, 0.0 if ray[0] > 0 else 1.0)
        at_v = [i for i, f in enumerate(poly.faces) if v in f]
        for i in at_v:
            incidence = max(incidence, abs(dot(ray, normals[i])))
        for i in at_v:
            for j in at_v:
                if i < j and len(set(poly.faces[i]) & set(poly.faces[j])) == 1:
                    tangency = max(tangency, abs(dot(normals[i], normals[j]) + 1.0))
        for i, f in enumerate(poly.faces):
            if v not in f:
                convexity = max(convexity, dot(ray, normals[i]))
    return {
        "unit_norm": float(unit),
        "adjacency": float(adjacency),
        "tangency": float(tangency),
        "ray_incidence": float(incidence),
        "ray_lightlike": float(lightlike),
        "ray_future": float(future),
        "convexity": float(max(convexity, 0.0)),
        "max": float(max(unit, adjacency, tangency, incidence, lightlike, future)),
    }


def random_lorentz(rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Random element of the identity component of O(3,1)."""
    gens = np.zeros((4, 4))
    rap = rng.normal(scale=scale, size=3)
    rot = rng.normal(scale=scale, size=3)
    gens[0, 1:] = gens[1:, 0] = rap
    gens[1, 2], gens[2, 1] = -rot[0], rot[0]
    gens[1, 3], gens[3, 1] = -rot[1], rot[1]
    gens[2, 3], gens[3, 2] = -rot[2], rot[2]
    return expm(gens)


# ---- high-precision polish ---------------------------------------------------------


def refine_high_precision(
    poly: CombinatorialPolytope, real: Realization, dps: int = 80, max_iterations: int = 30
) -> list[list]:
    """Polish a double-precision realization to about ``dps`` digits.

    Mixed-precision iterative refinement: residuals are evaluated in mpmath,
    correction steps come from a float64 least-squares solve, so each sweep
    gains roughly twelve digits.  Face 0 and its first neighbour are frozen
    at their canonical values.  Returns the normals as lists of ``mpf``.
    """
    import mpmath

    pairs, targets = constraint_pairs(poly)
    nf = poly.num_faces
    f1 = min(poly.face_adjacency[0])
    free = np.array([f for f in range(nf) if f not in (0, f1)])
    cols = (4 * free[:, None] + np.arange(4)).ravel()
    normals = np.asarray(real.normals, dtype=float)
    sig = (-1, 1, 1, 1)
    with mpmath.workdps(dps + 10):
        e = [[mpmath.mpf(float(x)) for x in row] for row in normals]
        e[0] = [mpmath.mpf(v) for v in (0, 0, 0, 1)]
        e[f1] = [mpmath.mpf(v) for v in (0, 0, 1, 0)]
        tol = mpmath.mpf(10) ** (-dps)
        jac = _jacobian(normals.ravel(), pairs)[:, cols]
        for _ in range(max_iterations):
            r = [
                sum(s * x * y for s, x, y in zip(sig, e[i], e[j])) - int(t)
                for (i, j), t in zip(pairs, targets)
            ]
            rmax = max(abs(x) for x in r)
            if rmax < tol:
                break
            scale = float(rmax)
            rf = np.array([float(x / rmax) for x in r])
            step, *_ = np.linalg.lstsq(jac, -rf, rcond=1e-12)
            for k, f in enumerate(free):
                for c in range(4):
                    e[f][c] += mpmath.mpf(float(step[4 * k + c])) * rmax
        else:
            raise SolverError(f"high-precision polish stalled at residual {scale:.3e}", scale)
        return [[+x for x in row] for row in e]
