"""Combinatorial 3-polytopes: antiprisms, edge twists, gluing, Andreev checks.

A polytope is stored as a tuple of faces, each face a cyclic tuple of vertex
ids.  All faces are oriented coherently: every directed edge ``u -> v``
occurs in exactly one face and its reverse ``v -> u`` in exactly one other.
Edges, adjacency and valences are derived on demand and cached.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import networkx as nx

from .errors import DomainError

Edge = tuple[int, int]

FILE_HEADER = "polytope v1"


def _edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


def _rotate(cycle: Sequence[int], start: int) -> tuple[int, ...]:
    i = cycle.index(start)
    return tuple(cycle[i:]) + tuple(cycle[:i])


@dataclass(frozen=True)
class CombinatorialPolytope:
    """Face complex of a 3-polytope with a coherent orientation.

    Construction validates the polytope: oriented 2-manifold without
    boundary, Euler characteristic 2, every vertex in at least three faces,
    and a 3-connected planar edge graph.
    """

    faces: tuple[tuple[int, ...], ...]
    name: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        faces = tuple(tuple(int(v) for v in f) for f in self.faces)
        object.__setattr__(self, "faces", faces)
        self._validate()

    def _validate(self) -> None:
        if len(self.faces) < 4:
            raise DomainError(f"a 3-polytope needs at least 4 faces, got {len(self.faces)}")
        darts: dict[Edge, int] = {}
        for fi, face in enumerate(self.faces):
            if len(face) < 3:
                raise DomainError(f"face {fi} has fewer than 3 vertices")
            if len(set(face)) != len(face):
                raise DomainError(f"face {fi} repeats a vertex: {face}")
            for u, v in zip(face, face[1:] + face[:1]):
                if (u, v) in darts:
                    raise DomainError(
                        f"directed edge {u}->{v} appears in faces {darts[(u, v)]} and {fi}; "
                        "faces are not coherently oriented"
                    )
                darts[(u, v)] = fi
        for (u, v), fi in darts.items():
            if (v, u) not in darts:
                raise DomainError(f"edge {u}-{v} of face {fi} lies in only one face")
        verts = {v for f in self.faces for v in f}
        if verts != set(range(len(verts))):
            raise DomainError("vertex ids must be exactly 0..V-1")
        if self.num_vertices - self.num_edges + self.num_faces != 2:
            raise DomainError(
                f"Euler relation fails: V={self.num_vertices} E={self.num_edges} F={self.num_faces}"
            )
        low = [v for v, k in enumerate(self.valences) if k < 3]
        if low:
            raise DomainError(f"vertices of valence < 3: {low}")
        graph = self.vertex_graph
        if not nx.check_planarity(graph)[0]:
            raise DomainError("edge graph is not planar")
        if nx.node_connectivity(graph) < 3:
            raise DomainError("edge graph is not 3-connected")

    # ---- derived structure -------------------------------------------------

    @cached_property
    def dart_face(self) -> dict[Edge, int]:
        """Map directed edge ``(u, v)`` to the face containing it."""
        out = {}
        for fi, face in enumerate(self.faces):
            for u, v in zip(face, face[1:] + face[:1]):
                out[(u, v)] = fi
        return out

    @cached_property
    def edges(self) -> tuple[Edge, ...]:
        return tuple(sorted({_edge(u, v) for (u, v) in self.dart_face}))

    @cached_property
    def edge_faces(self) -> dict[Edge, tuple[int, int]]:
        """Map each undirected edge to its two faces (face on ``u->v`` first, u < v)."""
        return {(u, v): (self.dart_face[(u, v)], self.dart_face[(v, u)]) for (u, v) in self.edges}

    @property
    def num_vertices(self) -> int:
        return 1 + max(v for f in self.faces for v in f)

    @property
    def num_edges(self) -> int:
        return len(self.dart_face) // 2

    @property
    def num_faces(self) -> int:
        return len(self.faces)

    @property
    def counts(self) -> tuple[int, int, int]:
        """``(V, E, F)``."""
        return self.num_vertices, self.num_edges, self.num_faces

    @cached_property
    def vertex_faces(self) -> tuple[frozenset[int], ...]:
        out: list[set[int]] = [set() for _ in range(self.num_vertices)]
        for fi, face in enumerate(self.faces):
            for v in face:
                out[v].add(fi)
        return tuple(frozenset(s) for s in out)

    @cached_property
    def valences(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.vertex_faces)

    @cached_property
    def face_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(f) for f in self.faces)

    @cached_property
    def vertex_graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.num_vertices))
        g.add_edges_from(self.edges)
        return g

    @cached_property
    def face_adjacency(self) -> tuple[frozenset[int], ...]:
        """Faces sharing an edge with each face."""
        out: list[set[int]] = [set() for _ in self.faces]
        for f, g in self.edge_faces.values():
            out[f].add(g)
            out[g].add(f)
        return tuple(frozenset(s) for s in out)

    def shared_edge(self, f: int, g: int) -> Edge | None:
        common = self.face_sets[f] & self.face_sets[g]
        if len(common) == 2:
            u, v = sorted(common)
            if (u, v) in self.edge_faces:
                return (u, v)
        return None

    def faces_meet(self, f: int, g: int) -> bool:
        return bool(self.face_sets[f] & self.face_sets[g])

    def vertex_cycle(self, v: int) -> tuple[int, ...]:
        """Faces around vertex ``v`` in cyclic order."""
        out_darts = [d for d in self.dart_face if d[0] == v]
        u = out_darts[0][1]
        order = []
        for _ in range(len(out_darts)):
            fi = self.dart_face[(v, u)]
            order.append(fi)
            face = self.faces[fi]
            # previous vertex before v in face fi is the next neighbour around v
            u = face[(face.index(v) - 1) % len(face)]
        return tuple(order)

    def opposite_face_pairs(self, v: int) -> list[tuple[int, int]]:
        """Pairs of faces at a 4-valent vertex that share only that vertex."""
        cyc = self.vertex_cycle(v)
        if len(cyc) != 4:
            return []
        return [(cyc[0], cyc[2]), (cyc[1], cyc[3])]

    def vertex_kind(self, v: int) -> str:
        return {3: "finite", 4: "ideal"}.get(self.valences[v], "invalid")

    @property
    def is_all_ideal(self) -> bool:
        return all(k == 4 for k in self.valences)

    def face_index(self, face: Iterable[int]) -> int:
        """Locate a face given as any rotation of its vertex cycle (or as a vertex set)."""
        target = frozenset(face)
        for fi, s in enumerate(self.face_sets):
            if s == target:
                return fi
        raise DomainError(f"no face with vertices {sorted(target)}")

    def relabel(self) -> "CombinatorialPolytope":
        """Renumber vertices 0..V-1 in order of first appearance."""
        ids: dict[int, int] = {}
        for f in self.faces:
            for v in f:
                ids.setdefault(v, len(ids))
        return CombinatorialPolytope(tuple(tuple(ids[v] for v in f) for f in self.faces), self.name)

    def mirror(self) -> "CombinatorialPolytope":
        return CombinatorialPolytope(tuple(tuple(reversed(f)) for f in self.faces), self.name)

    # ---- file format -------------------------------------------------------

    def dumps(self) -> str:
        lines = [FILE_HEADER, f"{self.num_vertices} {self.num_faces}"]
        lines += [" ".join(str(v) for v in f) for f in self.faces]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str, name: str = "") -> "CombinatorialPolytope":
        lines = [ln.strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln and not ln.startswith("#")]
        if not lines or lines[0] != FILE_HEADER:
            raise DomainError(f"expected header {FILE_HEADER!r}")
        try:
            nv, nf = (int(t) for t in lines[1].split())
            faces = tuple(tuple(int(t) for t in ln.split()) for ln in lines[2:])
        except (IndexError, ValueError) as exc:
            raise DomainError(f"malformed polytope file: {exc}") from None
        if len(faces) != nf:
            raise DomainError(f"header announces {nf} faces, found {len(faces)}")
        poly = cls(faces, name)
        if poly.num_vertices != nv:
            raise DomainError(f"header announces {nv} vertices, found {poly.num_vertices}")
        return poly


# ---- named polytopes ---------------------------------------------------------


def antiprism(n: int) -> CombinatorialPolytope:
    """The n-antiprism.

    Face 0 is the top n-gon ``(0, ..., n-1)``, face 1 the bottom n-gon on
    vertices ``n..2n-1``; the belt triangles follow in alternating order.
    """
    if n < 3:
        raise DomainError(f"antiprism needs n >= 3, got {n}")
    top = tuple(range(n))
    bottom = tuple(n + i for i in reversed(range(n)))
    faces = [top, bottom]
    for i in range(n):
        j = (i + 1) % n
        faces.append((j, i, n + i))
        faces.append((j, n + i, n + j))
    return CombinatorialPolytope(tuple(faces), f"A_{n}")


def prism(n: int) -> CombinatorialPolytope:
    if n < 3:
        raise DomainError(f"prism needs n >= 3, got {n}")
    faces = [tuple(range(n)), tuple(n + i for i in reversed(range(n)))]
    for i in range(n):
        j = (i + 1) % n
        faces.append((j, i, n + i, n + j))
    return CombinatorialPolytope(tuple(faces), f"prism_{n}")


def tetrahedron() -> CombinatorialPolytope:
    return CombinatorialPolytope(((0, 1, 2), (0, 2, 3), (0, 3, 1), (1, 3, 2)), "tetrahedron")


def cube() -> CombinatorialPolytope:
    return CombinatorialPolytope(prism(4).faces, "cube")


# ---- surgery -----------------------------------------------------------------


def edge_twist(poly: CombinatorialPolytope, e1: Edge, e2: Edge) -> CombinatorialPolytope:
    """Remove two disjoint edges of a common face and cone a new vertex to their endpoints.

    The face and the two faces across the removed edges are re-split into
    four faces around the new vertex, so ``(V, E, F)`` becomes
    ``(V + 1, E + 2, F + 1)``.
    """
    e1, e2 = _edge(*e1), _edge(*e2)
    for e in (e1, e2):
        if e not in poly.edge_faces:
            raise DomainError(f"{e} is not an edge")
    if set(e1) & set(e2):
        raise DomainError(f"edges {e1} and {e2} are not disjoint")
    common = set(poly.edge_faces[e1]) & set(poly.edge_faces[e2])
    if not common:
        raise DomainError(f"edges {e1} and {e2} do not lie on a common face")
    fi = common.pop()
    face = poly.faces[fi]
    # orient both edges along the face: a -> b, c -> d
    (a, b), (c, d) = (
        (u, v) if poly.dart_face.get((u, v)) == fi else (v, u) for (u, v) in (e1, e2)
    )
    face = _rotate(face, a)
    if face[1] != b:
        raise AssertionError("face orientation mismatch")
    ic = face.index(c)
    path_bc = face[1 : ic + 1]  # b .. c
    path_da = face[ic + 1 :] + (a,)  # d .. a
    g1 = poly.dart_face[(b, a)]
    g2 = poly.dart_face[(d, c)]
    rest1 = _rotate(poly.faces[g1], b)[2:]  # after b, a
    rest2 = _rotate(poly.faces[g2], d)[2:]  # after d, c
    w = poly.num_vertices
    new = list(poly.faces)
    new[g1] = (b, w, a) + rest1
    new[g2] = (d, w, c) + rest2
    new[fi] = (w,) + path_bc
    new.append((w,) + path_da)
    return CombinatorialPolytope(tuple(new), f"twist({poly.name})" if poly.name else "")


def twisted_antiprism(n: int, k: int) -> CombinatorialPolytope:
    """A_{n,k}: twist two edges of the top n-gon of A_n with k-2 edges between them.

    The twisted edges are ``(0, 1)`` and ``(k-1, k)``.  Requires
    ``3 <= k <= n/2 + 1``; adjacent edges (k = 2) are rejected.
    """
    if n < 4 or not (3 <= k <= n / 2 + 1):
        raise DomainError(f"twist parameters need 3 <= k <= n/2 + 1, got n={n}, k={k}")
    out = edge_twist(antiprism(n), (0, 1), (k - 1, k))
    return CombinatorialPolytope(out.faces, f"A_{n},{k}")


def glue(
    p1: CombinatorialPolytope,
    f1: int,
    p2: CombinatorialPolytope,
    f2: int,
    matching: Mapping[int, int] | None = None,
) -> CombinatorialPolytope:
    """Glue ``p2`` to ``p1`` along faces ``f1`` and ``f2`` (right-angled merge rule).

    ``matching`` sends each vertex of ``p1.faces[f1]`` to a vertex of
    ``p2.faces[f2]`` and must reverse cyclic order.  If omitted, the first
    vertices of both faces are matched and orientation is reversed.  For
    each interface edge the two faces adjacent to it (one per piece) merge
    into a single face; the interface faces themselves disappear.
    """
    face1, face2 = p1.faces[f1], p2.faces[f2]
    m = len(face1)
    if len(face2) != m:
        raise DomainError(f"interface faces have different lengths: {m} vs {len(face2)}")
    if matching is None:
        matching = {face1[i]: face2[-i % m] for i in range(m)}
    matching = dict(matching)
    if set(matching) != set(face1) or set(matching.values()) != set(face2):
        raise DomainError("matching is not a bijection between the interface faces")
    for u, v in zip(face1, face1[1:] + face1[:1]):
        if p2.dart_face.get((matching[v], matching[u])) != f2:
            raise DomainError("matching does not reverse the cyclic order of the interface")
    # rename p2 vertices into p1's id space
    inverse = {w: u for u, w in matching.items()}
    ren: dict[int, int] = dict(inverse)
    nxt = p1.num_vertices
    for v in range(p2.num_vertices):
        if v not in ren:
            ren[v] = nxt
            nxt += 1
    faces2 = [tuple(ren[v] for v in f) for f in p2.faces]
    dart2 = {(ren[u], ren[v]): fi for (u, v), fi in p2.dart_face.items()}

    merged1: dict[int, tuple[int, ...]] = {}
    consumed2: set[int] = set()
    for u, v in zip(face1, face1[1:] + face1[:1]):
        a = p1.dart_face[(v, u)]
        b = dart2[(u, v)]
        alpha = _rotate(p1.faces[a], u)  # u, ..., v
        beta = _rotate(faces2[b], v)  # v, ..., u
        merged1[a] = alpha + beta[1:-1]
        consumed2.add(b)
    faces: list[tuple[int, ...]] = []
    for fi, face in enumerate(p1.faces):
        if fi != f1:
            faces.append(merged1.get(fi, face))
    for fi, face in enumerate(faces2):
        if fi != f2 and fi not in consumed2:
            faces.append(face)
    name = f"glue({p1.name},{p2.name})" if p1.name and p2.name else ""
    return CombinatorialPolytope(tuple(faces), name).relabel()


def glue_antiprisms(k: int, m: int) -> CombinatorialPolytope:
    """Glue A_k and A_m along belt triangles so that their top polygons merge.

    This is the decomposition of A_{k+m-2, k}: the top k-gon and top m-gon
    fuse into a (k+m-2)-gon and the two neighbouring triangle pairs fuse
    into quadrilaterals.
    """
    a, b = antiprism(k), antiprism(m)
    # belt triangle (1, 0, n) borders the top face along 1 -> 0
    t1 = a.face_index((1, 0, k))
    t2 = b.face_index((1, 0, m))
    out = glue(a, t1, b, t2, {1: 0, 0: 1, k: m})
    return CombinatorialPolytope(out.faces, f"A_{k}+A_{m}")


# ---- Andreev's right-angled conditions ----------------------------------------


@dataclass(frozen=True)
class AndreevVerdict:
    violations: tuple[tuple[int, tuple[int, ...]], ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def conditions(self) -> set[int]:
        return {c for c, _ in self.violations}

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [{"condition": c, "witness": list(w)} for c, w in self.violations],
        }


def _is_triangular_prism(poly: CombinatorialPolytope) -> bool:
    sizes = sorted(len(f) for f in poly.faces)
    return poly.num_faces == 5 and sizes == [3, 3, 4, 4, 4]


def violates_condition(poly: CombinatorialPolytope, condition: int, witness: Sequence[int]) -> bool:
    """Re-check a single Andreev witness from scratch."""
    w = tuple(witness)
    if condition == 1:
        return poly.num_faces == 4 or _is_triangular_prism(poly)
    if condition == 2:
        (v,) = w
        return poly.valences[v] > 4
    if condition == 3:
        f, g, h = w
        e1, e2 = poly.shared_edge(f, g), poly.shared_edge(f, h)
        return (
            e1 is not None
            and e2 is not None
            and not set(e1) & set(e2)
            and poly.faces_meet(g, h)
        )
    if condition == 4:
        if len(set(w)) != 4:
            return False
        es = [poly.shared_edge(w[i], w[(i + 1) % 4]) for i in range(4)]
        if any(e is None for e in es):
            return False
        return all(not set(x) & set(y) for x, y in itertools.combinations(es, 2))
    raise ValueError(f"unknown condition {condition}")


def check_andreev(poly: CombinatorialPolytope) -> AndreevVerdict:
    """Check the four right-angled Andreev conditions, collecting witnesses."""
    out: list[tuple[int, tuple[int, ...]]] = []
    if poly.num_faces == 4 or _is_triangular_prism(poly):
        out.append((1, tuple(range(poly.num_faces))))
    for v, k in enumerate(poly.valences):
        if k > 4:
            out.append((2, (v,)))
    adj = poly.face_adjacency
    for f in range(poly.num_faces):
        for g, h in itertools.combinations(sorted(adj[f]), 2):
            if violates_condition(poly, 3, (f, g, h)):
                out.append((3, (f, g, h)))
    seen = set()
    for f1 in range(poly.num_faces):
        for f2 in adj[f1]:
            for f3 in adj[f2]:
                if f3 == f1:
                    continue
                for f4 in adj[f3] & adj[f1]:
                    if f4 in (f1, f2):
                        continue
                    cyc = (f1, f2, f3, f4)
                    key = _canonical_cycle(cyc)
                    if key in seen:
                        continue
                    seen.add(key)
                    if violates_condition(poly, 4, cyc):
                        out.append((4, key))
    return AndreevVerdict(tuple(out))


def _canonical_cycle(cyc: Sequence[int]) -> tuple[int, ...]:
    """Smallest rotation/reflection of a cyclic sequence."""
    n = len(cyc)
    cands = []
    for seq in (tuple(cyc), tuple(reversed(cyc))):
        for i in range(n):
            cands.append(seq[i:] + seq[:i])
    return min(cands)


# ---- isomorphism ----------------------------------------------------------------


def _dart_code(poly: CombinatorialPolytope, start: Edge) -> tuple[tuple[int, ...], list[Edge]]:
    """Breadth-first dart labelling from ``start``; returns (code, dart order)."""
    face_next = {}
    for face in poly.faces:
        for i, u in enumerate(face):
            v = face[(i + 1) % len(face)]
            w = face[(i + 2) % len(face)]
            face_next[(u, v)] = (v, w)
    label = {start: 0}
    order = [start]
    queue = deque([start])
    code: list[int] = []
    while queue:
        d = queue.popleft()
        for nb in (face_next[d], (d[1], d[0])):
            if nb not in label:
                label[nb] = len(order)
                order.append(nb)
                queue.append(nb)
            code.append(label[nb])
    return tuple(code), order


def canonical_form(poly: CombinatorialPolytope) -> tuple[int, ...]:
    """Orientation-blind canonical code of the face complex."""
    best = None
    for p in (poly, poly.mirror()):
        for d in p.dart_face:
            code, _ = _dart_code(p, d)
            if best is None or code < best:
                best = code
    return best


def isomorphism(p1: CombinatorialPolytope, p2: CombinatorialPolytope) -> dict[str, dict[int, int]] | None:
    """Find a combinatorial equivalence ``p1 -> p2``, allowing orientation reversal.

    Returns ``{"vertices": {...}, "faces": {...}}`` or None.
    """
    if p1.counts != p2.counts:
        return None
    if sorted(len(f) for f in p1.faces) != sorted(len(f) for f in p2.faces):
        return None
    d0 = next(iter(p1.dart_face))
    code1, order1 = _dart_code(p1, d0)
    for q in (p2, p2.mirror()):
        for d in q.dart_face:
            code2, order2 = _dart_code(q, d)
            if code2 != code1:
                continue
            vmap = {a[0]: b[0] for a, b in zip(order1, order2)}
            fmap = {p1.dart_face[a]: q.dart_face[b] for a, b in zip(order1, order2)}
            return {"vertices": vmap, "faces": fmap}
    return None


def is_isomorphic(p1: CombinatorialPolytope, p2: CombinatorialPolytope) -> bool:
    return isomorphism(p1, p2) is not None


def check_isomorphism_witness(
    p1: CombinatorialPolytope, p2: CombinatorialPolytope, witness: Mapping[str, Mapping[int, int]]
) -> bool:
    """Verify that a witness map sends every face of ``p1`` onto the matching face of ``p2``."""
    vmap, fmap = witness["vertices"], witness["faces"]
    if sorted(vmap.values()) != list(range(p2.num_vertices)):
        return False
    if sorted(fmap.values()) != list(range(p2.num_faces)):
        return False
    return all(
        frozenset(vmap[v] for v in p1.faces[f]) == p2.face_sets[fmap[f]] for f in range(p1.num_faces)
    )
