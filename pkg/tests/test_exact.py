from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from rootcone.exact import (
    RatMat,
    RatVec,
    SingularMatrixError,
    as_rat,
    dot,
    mat_det,
    mat_invert,
    nullspace,
    primitive_integer,
    rat_str,
    solve_linear,
)

small = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def square(n):
    return st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)


def test_dot_orthogonal_axes():
    assert dot(RatVec([1, 0]), RatVec([0, 1])) == 0
    assert dot(RatVec([1, 1]), RatVec([1, -1])) == 0


def test_dot_dimension_mismatch():
    with pytest.raises(ValueError):
        dot(RatVec([1, 2]), RatVec([1]))


def test_floats_rejected():
    with pytest.raises(TypeError):
        as_rat(0.5)


def test_rat_string_form():
    assert rat_str(Fraction(6, -4)) == "-3/2"
    assert rat_str(Fraction(4, 2)) == "2"


@given(st.lists(small, min_size=3, max_size=3), st.lists(small, min_size=3, max_size=3),
       st.lists(small, min_size=3, max_size=3))
def test_dot_bilinear_symmetric(a, b, c):
    a, b, c = RatVec(a), RatVec(b), RatVec(c)
    assert dot(a + b, c) == dot(a, c) + dot(b, c)
    assert dot(a, b) == dot(b, a)


@given(small)
def test_lowest_terms(x):
    v = RatVec([x])[0]
    from math import gcd

    assert v.denominator > 0 and gcd(abs(v.numerator), v.denominator) == 1


def test_invert_identity_and_a2_cartan():
    assert mat_invert(RatMat.identity(4)) == RatMat.identity(4)
    inv = mat_invert(RatMat([[2, -1], [-1, 2]]))
    assert inv == RatMat([[Fraction(2, 3), Fraction(1, 3)], [Fraction(1, 3), Fraction(2, 3)]])


def test_solve_a2_cartan():
    x = solve_linear(RatMat([[2, -1], [-1, 2]]), RatVec([1, 0]))
    assert x == RatVec([Fraction(2, 3), Fraction(1, 3)])
    b = RatVec([3, Fraction(1, 2), -1])
    assert solve_linear(RatMat.identity(3), b) == b


def test_singular_raises():
    with pytest.raises(SingularMatrixError):
        mat_invert(RatMat([[1, 2], [2, 4]]))


@given(st.integers(1, 6).flatmap(square))
def test_inverse_matches_sympy(rows):
    m = RatMat(rows)
    ref = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in r] for r in rows])
    assert mat_det(m) == Fraction(str(ref.det()))
    if ref.det() == 0:
        with pytest.raises(SingularMatrixError):
            mat_invert(m)
        return
    inv = mat_invert(m)
    n = m.nrows
    assert (m @ inv).is_identity() and (inv @ m).is_identity()
    ref_inv = ref.inv()
    assert inv.tolist() == [[Fraction(str(ref_inv[i, j])) for j in range(n)] for i in range(n)]


@given(square(4), st.lists(small, min_size=4, max_size=4))
def test_solve_multiply_back(rows, b):
    m = RatMat(rows)
    if mat_det(m) == 0:
        return
    x = solve_linear(m, RatVec(b))
    assert m @ x == RatVec(b)


@given(st.integers(1, 4), st.integers(1, 5), st.data())
def test_nullspace_is_kernel(m, n, data):
    rows = data.draw(st.lists(st.lists(small, min_size=n, max_size=n), min_size=m, max_size=m))
    a = RatMat(rows)
    basis = nullspace(a)
    assert len(basis) == n - a.rank()
    for v in basis:
        assert (a @ v).is_zero()


def test_primitive_integer():
    assert primitive_integer([Fraction(1, 2), Fraction(1, 3), 0]) == [3, 2, 0]
    assert primitive_integer([Fraction(4), Fraction(6)]) == [2, 3]
