"""Exact LLL reduction and integer-relation search for minimal polynomials."""

from __future__ import annotations

from fractions import Fraction
from math import gcd

import mpmath


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def lll_reduce(basis: list[list[int]], delta: Fraction = Fraction(3, 4)) -> list[list[int]]:
    """LLL-reduce the rows of an integer matrix (exact rational Gram-Schmidt).

    Meant for the small dimensions (< 12) used in relation finding.
    """
    b = [list(map(int, row)) for row in basis]
    n = len(b)
    if n == 0:
        return b

    # Gram-Schmidt coefficients mu and squared norms bn, updated in place on swaps
    mu = [[Fraction(0)] * n for _ in range(n)]
    bn: list[Fraction] = []
    bstar: list[list[Fraction]] = []
    for i in range(n):
        v = [Fraction(x) for x in b[i]]
        for j in range(i):
            mu[i][j] = _dot(b[i], bstar[j]) / bn[j] if bn[j] else Fraction(0)
            v = [x - mu[i][j] * y for x, y in zip(v, bstar[j])]
        bstar.append(v)
        bn.append(_dot(v, v))

    def size_reduce(k: int, j: int) -> None:
        q = round(mu[k][j])
        if q:
            b[k] = [x - q * y for x, y in zip(b[k], b[j])]
            for i in range(j):
                mu[k][i] -= q * mu[j][i]
            mu[k][j] -= q

    k = 1
    while k < n:
        size_reduce(k, k - 1)
        if bn[k] < (delta - mu[k][k - 1] ** 2) * bn[k - 1]:
            m = mu[k][k - 1]
            big = bn[k] + m * m * bn[k - 1]
            b[k], b[k - 1] = b[k - 1], b[k]
            for j in range(k - 1):
                mu[k][j], mu[k - 1][j] = mu[k - 1][j], mu[k][j]
            if big:
                mu[k][k - 1] = m * bn[k - 1] / big
                bn[k] = bn[k - 1] * bn[k] / big
            else:
                mu[k][k - 1] = Fraction(0)
                bn[k] = Fraction(0)
            bn[k - 1] = big
            for i in range(k + 1, n):
                t = mu[i][k]
                mu[i][k] = mu[i][k - 1] - m * t
                mu[i][k - 1] = t + mu[k][k - 1] * mu[i][k]
            k = max(k - 1, 1)
        else:
            for j in range(k - 2, -1, -1):
                size_reduce(k, j)
            k += 1
    return b


def minimal_polynomial(value, max_degree: int = 8, dps: int = 80) -> tuple[int, ...] | None:
    """Integer minimal polynomial of ``value`` (coefficients, highest degree first).

    Tries degrees 1..max_degree in turn; for degree d the lattice spanned
    by ``(e_i, round(C * value**i))`` is LLL-reduced and the first row is
    accepted if the polynomial it encodes vanishes at ``value`` far below
    the lattice scale: a chance short vector leaves a residual of about
    ``max|c| / C`` with ``C = 10**(dps/2)``, a true relation one of about
    ``10**-dps``.  Returns None if no degree succeeds.
    """
    with mpmath.workdps(dps):
        x = mpmath.mpf(value)
        scale = mpmath.mpf(10) ** (dps // 2)
        for d in range(1, max_degree + 1):
            powers = [x**i for i in range(d + 1)]
            rows = [
                [1 if j == i else 0 for j in range(d + 1)] + [int(mpmath.nint(scale * powers[i]))]
                for i in range(d + 1)
            ]
            red = lll_reduce(rows)
            for row in red[:1]:
                coeffs = row[: d + 1]
                if coeffs[d] == 0:
                    continue
                resid = abs(sum(c * p for c, p in zip(coeffs, powers)))
                height = max(abs(c) for c in coeffs)
                if resid <= height * mpmath.mpf(10) ** (-(dps // 2 + 8)):
                    g = 0
                    for c in coeffs:
                        g = gcd(g, c)
                    out = [c // g for c in reversed(coeffs)]
                    if out[0] < 0:
                        out = [-c for c in out]
                    return tuple(out)
    return None
