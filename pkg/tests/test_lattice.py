import math

import mpmath
import sympy

from hybridcox.lattice import lll_reduce, minimal_polynomial


def test_lll_small_example():
    basis = [[1, 1, 1], [-1, 0, 2], [3, 5, 6]]
    red = lll_reduce(basis)
    assert red == [[0, 1, 0], [1, 0, 1], [-1, 0, 2]]
    # same lattice: unimodular change of basis
    assert abs(round(sympy.Matrix(red).det())) == abs(round(sympy.Matrix(basis).det()))


def test_lll_first_vector_is_short():
    basis = [[1, 0, 0, 1234567], [0, 1, 0, 7654321], [0, 0, 1, 1111111]]
    red = lll_reduce(basis)
    assert sum(x * x for x in red[0]) < sum(x * x for x in basis[0])


def test_minimal_polynomials():
    with mpmath.workdps(80):
        assert minimal_polynomial(mpmath.sqrt(2)) == (1, 0, -2)
        assert minimal_polynomial(mpmath.mpf(-16) / 3) == (3, 16)
        assert minimal_polynomial(2 * mpmath.cos(2 * mpmath.pi / 7)) == (1, 1, -2, -1)
        golden = (1 + mpmath.sqrt(5)) / 2
        assert minimal_polynomial(golden**2) == (1, -3, 1)
        assert minimal_polynomial(mpmath.pi) is None


def test_minimal_polynomial_integers():
    assert minimal_polynomial(8) == (1, -8)
    assert minimal_polynomial(-64) == (1, 64)


def test_recovered_polynomials_are_irreducible_and_vanish():
    x = sympy.Symbol("x")
    with mpmath.workdps(80):
        values = [mpmath.sqrt(3) + 1, mpmath.cbrt(2), 2 * mpmath.cos(2 * mpmath.pi / 9), mpmath.sqrt(2) + mpmath.sqrt(3)]
        for v in values:
            coeffs = minimal_polynomial(v)
            assert coeffs is not None
            poly = sympy.Poly(coeffs, x)
            assert poly.is_irreducible
            assert abs(mpmath.polyval(list(coeffs), v)) < 1e-6
            assert math.gcd(*coeffs) == 1
