"""Static SVG drawings: planar diagrams of polytopes and glued polygons."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

from .combinatorics import CombinatorialPolytope
from .hybrid import CoxeterPolygon, GluingSpec, format_angle, glue_polygons

SIZE = 400


def tutte_layout(poly: CombinatorialPolytope, outer: int | None = None) -> np.ndarray:
    """Tutte embedding with the largest face (or ``outer``) on the unit circle."""
    if outer is None:
        outer = max(range(poly.num_faces), key=lambda f: (len(poly.faces[f]), -f))
    boundary = poly.faces[outer]
    n = poly.num_vertices
    pos = np.zeros((n, 2))
    fixed = np.zeros(n, dtype=bool)
    for t, v in enumerate(boundary):
        ang = 2 * math.pi * t / len(boundary)
        pos[v] = (math.cos(ang), math.sin(ang))
        fixed[v] = True
    free = np.flatnonzero(~fixed)
    if len(free):
        idx = {v: i for i, v in enumerate(free)}
        lap = np.zeros((len(free), len(free)))
        rhs = np.zeros((len(free), 2))
        for v in free:
            nbrs = list(poly.vertex_graph.neighbors(v))
            lap[idx[v], idx[v]] = len(nbrs)
            for u in nbrs:
                if fixed[u]:
                    rhs[idx[v]] += pos[u]
                else:
                    lap[idx[v], idx[u]] -= 1
        pos[free] = np.linalg.solve(lap, rhs)
    return pos


def _doc(body: list[str], width: int = SIZE, height: int = SIZE) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">'
    )
    return "\n".join([head, f'<rect width="{width}" height="{height}" fill="white"/>', *body, "</svg>"]) + "\n"


def polytope_svg(poly: CombinatorialPolytope) -> str:
    """Schlegel-style diagram of the vertex graph with vertex ids."""
    pos = tutte_layout(poly)
    c, r = SIZE / 2, SIZE / 2 - 30
    xy = [(c + r * x, c - r * y) for x, y in pos]
    body = []
    if poly.name:
        body.append(f'<text x="10" y="20" font-size="14">{escape(poly.name)}</text>')
    for u, v in poly.edges:
        (x1, y1), (x2, y2) = xy[u], xy[v]
        body.append(f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" stroke="black"/>')
    for v, (x, y) in enumerate(xy):
        body.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="4" fill="steelblue"/>')
        body.append(f'<text x="{x + 6:.2f}" y="{y - 6:.2f}" font-size="10">{v}</text>')
    return _doc(body)


def _polygon_points(n: int, cx: float, cy: float, r: float, phase: float) -> list[tuple[float, float]]:
    return [
        (cx + r * math.cos(phase + 2 * math.pi * t / n), cy - r * math.sin(phase + 2 * math.pi * t / n))
        for t in range(n)
    ]


def _draw_polygon(p: CoxeterPolygon, pts, dashed_side: int | None, label: str) -> list[str]:
    out = []
    n = len(pts)
    for t in range(n):
        (x1, y1), (x2, y2) = pts[t], pts[(t + 1) % n]
        style = ' stroke-dasharray="5,4" stroke="firebrick"' if t == dashed_side else ' stroke="black"'
        out.append(f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}"{style}/>')
    cx = sum(x for x, _ in pts) / n
    cy = sum(y for _, y in pts) / n
    for (x, y), a in zip(pts, p.angles):
        lx, ly = x + 0.25 * (cx - x), y + 0.25 * (cy - y)
        out.append(f'<text x="{lx:.2f}" y="{ly:.2f}" font-size="11" text-anchor="middle">{format_angle(a)}</text>')
    out.append(f'<text x="{cx:.2f}" y="{cy:.2f}" font-size="13" text-anchor="middle">{escape(label)}</text>')
    return out


def gluing_svg(spec: GluingSpec) -> str:
    """The two polygons (interface dashed) and the glued result, with angle labels.

    The drawing is combinatorial: polygons are drawn regular, and only the
    angle labels carry geometric content.
    """
    p, q = spec.piece1, spec.piece2
    glued = glue_polygons(spec)
    width = 3 * SIZE // 2 + 300
    body = []
    body += _draw_polygon(p, _polygon_points(p.n, 150, 200, 110, math.pi / 2), spec.interface1, p.name or "P1")
    body += _draw_polygon(q, _polygon_points(q.n, 420, 200, 110, -math.pi / 2), spec.interface2, q.name or "P2")
    body.append('<text x="560" y="205" font-size="20">=</text>')
    body += _draw_polygon(glued, _polygon_points(glued.n, 760, 200, 130, math.pi / 4), None, glued.name or "P")
    area = f"area/pi: {p.area} + {q.area} = {glued.area}"
    body.append(f'<text x="10" y="385" font-size="13">{escape(area)}</text>')
    return _doc(body, width, SIZE)
