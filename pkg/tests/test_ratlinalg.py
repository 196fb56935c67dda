import itertools
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from sharpald.errors import ArgumentError, ResourceLimit, SingularMatrix
from sharpald.exactnum import sqrt_upper
from sharpald.ratlinalg import (RatMatrix, adjugate, beta, det, det_cofactor, enumerate_bases, inverse, nullspace,
                                rank, rref, solve_linear)

from strategies import int_matrix, rationals, square_matrix


def sym(M):
    return sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in r] for r in M])


def to_frac(x):
    return Fraction(int(x.p), int(x.q))


@given(square_matrix())
def test_det_matches_sympy(rows):
    M = RatMatrix(rows)
    assert det(M) == to_frac(sym(M).det())
    assert det(M) == det_cofactor(M)


@given(square_matrix())
def test_inverse_and_adjugate(rows):
    M = RatMatrix(rows)
    d = det(M)
    n = M.rows
    assert M @ adjugate(M) == RatMatrix.identity(n).scale(d)
    if d == 0:
        with pytest.raises(SingularMatrix):
            inverse(M)
    else:
        assert M @ inverse(M) == RatMatrix.identity(n)


@given(st.integers(1, 4).flatmap(lambda r: st.integers(1, 4).flatmap(lambda c: int_matrix(r, c, rationals))))
def test_rank_rref_nullspace(rows):
    M = RatMatrix(rows)
    assert rank(M) == sym(M).rank()
    R, piv = rref(M)
    SR, spiv = sym(M).rref()
    assert tuple(piv) == tuple(spiv)
    assert [[to_frac(x) for x in r] for r in SR.tolist()][:len(piv)] == [list(r) for r in R][:len(piv)]
    ns = nullspace(M)
    assert len(ns) == M.cols - rank(M)
    for v in ns:
        assert all(x == 0 for x in M @ v)


@given(st.integers(1, 3).flatmap(lambda n: st.tuples(int_matrix(n, n, rationals),
                                                     st.lists(rationals, min_size=n, max_size=n))))
def test_solve_linear(data):
    rows, rhs = data
    M = RatMatrix(rows)
    x = solve_linear(M, rhs)
    consistent = sym(M).rank() == sym(M).row_join(sym(RatMatrix([[r] for r in rhs]))).rank()
    assert (x is not None) == consistent
    if x is not None:
        assert list(M @ x) == [Fraction(r) for r in rhs]


def test_degenerate_examples():
    assert det(RatMatrix([[1, 2], [2, 4]])) == 0
    assert det(RatMatrix([[2, 0], [0, 3]])) == 6
    with pytest.raises(ArgumentError):
        det(RatMatrix([[1, 2, 3]]))


def test_basis_enumeration_small():
    bases = enumerate_bases(RatMatrix([[1, 1, 0], [0, 1, 1]]))
    assert sorted(b.columns for b in bases) == [(0, 1), (0, 2), (1, 2)]
    assert sorted(abs(d) for d in bases.dets) == [1, 1, 1]
    # ||B^-1||_F^2 is 3 for (0,1) and (1,2), 2 for (0,2)
    assert bases.max_inv_frob_sq == 3
    assert beta(RatMatrix([[1, 1, 0], [0, 1, 1]])) == sqrt_upper(3)


@given(st.integers(1, 2).flatmap(lambda r: st.integers(r, 4).flatmap(lambda c: int_matrix(r, c))))
def test_basis_enumeration_against_combinations(rows):
    M = RatMatrix(rows)
    expected = [cols for cols in itertools.combinations(range(M.cols), M.rows)
                if sym(M.columns(cols)).det() != 0]
    assert [b.columns for b in enumerate_bases(M)] == expected


def test_basis_cap():
    with pytest.raises(ResourceLimit):
        enumerate_bases(RatMatrix([[1] * 10, [0] * 9 + [1]]), cap=5)
