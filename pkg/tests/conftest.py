import math

import numpy as np
import pytest

from hybridcox.combinatorics import antiprism
from hybridcox.pipeline import analyze


def octahedron_normals() -> np.ndarray:
    """Hand-derived outward normals of the ideal regular octahedron.

    Put the vertices of ``antiprism(3)`` at ``+-e_i`` on the sphere at
    infinity (antipodal vertices are the non-adjacent pairs).  A face
    with vertices ``s_a e_a``, one per axis, lies in the Klein-model plane
    ``sum s_a x_a = 1``, whose unit normal is ``(1, s) / sqrt(2)``.
    """
    poly = antiprism(3)
    g = poly.vertex_graph
    position = {}
    for v in range(poly.num_vertices):
        if v in position:
            continue
        axis = len(position) // 2
        (opp,) = [u for u in range(poly.num_vertices) if u != v and not g.has_edge(u, v)]
        position[v], position[opp] = (axis, 1.0), (axis, -1.0)
    out = []
    for face in poly.faces:
        s = np.zeros(4)
        s[0] = 1.0
        for v in face:
            axis, sign = position[v]
            s[1 + axis] = sign
        out.append(s / math.sqrt(2))
    return np.array(out)


@pytest.fixture(scope="session")
def octahedron():
    return antiprism(3)


@pytest.fixture(scope="session")
def analysis():
    """Memoized full analysis of a polytope."""
    return analyze
