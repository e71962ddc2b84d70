import math

import mpmath
import numpy as np
import pytest

from conftest import octahedron_normals
from hybridcox.combinatorics import antiprism, cube, twisted_antiprism
from hybridcox.errors import DomainError, InconsistencyError
from hybridcox.invariants import (
    ADJACENT,
    DIVERGING,
    TANGENT,
    gram,
    ideal_tetrahedron_angles,
    lobachevsky,
    volume_ideal,
)
from hybridcox.realization import Realization, realize_ideal_right_angled, vertex_rays

OCTAHEDRON_VOLUME = 3.66386237670887606


def _series(theta: float, terms: int = 10**6) -> float:
    k = np.arange(1, terms + 1, dtype=float)
    return 0.5 * float(np.sum(np.sin(2 * k * theta) / k**2))


def test_lobachevsky_values():
    assert lobachevsky(0.0) == 0.0
    assert abs(lobachevsky(math.pi / 2)) < 1e-15
    assert abs(lobachevsky(math.pi / 6) - float(mpmath.clsin(2, math.pi / 3)) / 2) < 1e-12
    assert abs(lobachevsky(math.pi / 6) - _series(math.pi / 6)) < 1e-6


def test_lobachevsky_against_clausen():
    for theta in np.linspace(-3, 3, 41):
        ref = float(mpmath.clsin(2, 2 * theta)) / 2
        assert abs(lobachevsky(theta) - ref) < 1e-13


def test_lobachevsky_maximum_at_pi_over_6():
    grid = np.linspace(0.01, math.pi / 2 - 0.01, 500)
    vals = [lobachevsky(t) for t in grid]
    assert abs(grid[int(np.argmax(vals))] - math.pi / 6) < 0.01


def test_octahedron_gram_classes(octahedron):
    hand = octahedron_normals()
    g = gram(octahedron, Realization(hand, vertex_rays(octahedron, hand), 0.0))
    assert np.array_equal(g.matrix, g.matrix.T)
    assert np.all(np.diag(g.matrix) == 1.0)
    assert np.max(np.abs(g.matrix - np.round(g.matrix))) <= 1e-12
    assert set(np.unique(np.round(g.matrix))) == {-2.0, -1.0, 0.0, 1.0}
    for i in range(8):
        for j in range(8):
            if i == j:
                continue
            expected = {ADJACENT: 0.0, TANGENT: -1.0, DIVERGING: -2.0}[g.kinds[i, j]]
            assert abs(g.matrix[i, j] - expected) <= 1e-12


def test_gram_flags_inconsistent_realization(octahedron):
    hand = octahedron_normals()
    swapped = hand.copy()
    swapped[[0, 2]] = swapped[[2, 0]]
    with pytest.raises(InconsistencyError):
        gram(octahedron, Realization(swapped, vertex_rays(octahedron, hand), 0.0))


def test_adjacent_entries_vanish():
    for n in (4, 7, 10):
        p = antiprism(n)
        g = gram(p, realize_ideal_right_angled(p))
        assert np.max(np.abs(g.matrix[g.kinds == ADJACENT])) <= 1e-9


def test_csv_emitter():
    p = antiprism(3)
    g = gram(p, realize_ideal_right_angled(p))
    rows = g.to_csv().strip().split("\n")
    assert len(rows) == 8
    back = np.array([[float(x) for x in r.split(",")] for r in rows])
    assert np.array_equal(back, g.matrix)


def test_ideal_tetrahedron_angles_regular():
    # the regular ideal tetrahedron (inf, 0, 1, e^{i pi/3}) moved by z -> 1/(z - 2)
    w = complex(0.5, math.sqrt(3) / 2)
    angles = ideal_tetrahedron_angles(0j, -0.5 + 0j, -1 + 0j, 1 / (w - 2))
    assert all(abs(a - math.pi / 3) < 1e-8 for a in angles)
    with pytest.raises(DomainError):
        ideal_tetrahedron_angles(0j, 1 + 0j, 2 + 0j, 3 + 0j)


def test_octahedron_volume_hand_oracle(octahedron):
    # four ideal tetrahedra with angles (pi/4, pi/4, pi/2) around the axis
    oracle = 4 * (2 * lobachevsky(math.pi / 4) + lobachevsky(math.pi / 2))
    assert abs(oracle - OCTAHEDRON_VOLUME) < 1e-14
    rep = volume_ideal(octahedron, realize_ideal_right_angled(octahedron))
    assert abs(rep.total - 3.663862) < 1e-5
    assert abs(rep.total - oracle) < 1e-10


def test_volume_report_invariants():
    p = twisted_antiprism(7, 3)
    rep = volume_ideal(p, realize_ideal_right_angled(p))
    assert abs(rep.total - math.fsum(rep.volumes)) < 1e-12
    for ang, vol in zip(rep.angles, rep.volumes):
        assert abs(sum(ang) - math.pi) < 1e-9
        assert vol >= 0
    d = rep.to_dict()
    assert set(d) == {"total", "apex", "tetrahedra"}
    assert set(d["tetrahedra"][0]) == {"vertices", "angles", "volume"}


def test_volume_apex_independence():
    for p in (antiprism(5), twisted_antiprism(8, 4)):
        real = realize_ideal_right_angled(p)
        totals = []
        for a in range(p.num_vertices):
            try:
                totals.append(volume_ideal(p, real, apex=a).total)
            except DomainError:
                continue
        assert len(totals) >= p.num_vertices // 2
        assert max(totals) - min(totals) < 1e-8


def test_volume_increases_with_n():
    vols = [volume_ideal(antiprism(n), realize_ideal_right_angled(antiprism(n))).total for n in range(3, 13)]
    assert all(b > a for a, b in zip(vols, vols[1:]))


def test_volume_additivity_under_glue():
    cache = {}

    def vol(p):
        if p.name not in cache:
            cache[p.name] = volume_ideal(p, realize_ideal_right_angled(p)).total
        return cache[p.name]

    for n in range(4, 11):
        for k in range(3, n // 2 + 2):
            lhs = vol(twisted_antiprism(n, k))
            rhs = vol(antiprism(k)) + vol(antiprism(n - k + 2))
            assert abs(lhs - rhs) < 1e-6, (n, k)


def test_volume_requires_ideal_vertices():
    with pytest.raises(DomainError):
        volume_ideal(cube(), Realization(np.zeros((6, 4)), np.zeros((8, 4)), 0.0))
