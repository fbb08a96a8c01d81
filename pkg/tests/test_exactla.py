from fractions import Fraction

import pytest as pytest
from hypothesis import given, settings, strategies as st
from sympy import QQ

from coring_cdga.errors import FormatError, ShapeError
from coring_cdga.exactla import (format_scalar, identity, inverse, is_invertible, kernel_basis, matrix_from_rows,
                                 parse_scalar, quotient_basis, rank, rref, scalar, solve, sparse_quotient,
                                 sparse_solve, to_rows, zeros)

small_ints = st.integers(min_value=-5, max_value=5)
fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)


def matrices(max_rows=4, max_cols=4):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(small_ints, min_size=c, max_size=c), min_size=r, max_size=r)))


def mat_vec(rows, v):
    return [sum((QQ(a) * b for a, b in zip(row, v)), QQ(0)) for row in rows]


def test_scalar_parsing():
    assert parse_scalar("3/6") == QQ(1, 2)
    assert parse_scalar("-4") == QQ(-4)
    assert scalar(Fraction(6, -4)) == QQ(-3, 2)
    assert format_scalar(QQ(4, 2)) == "2"
    assert format_scalar(QQ(-2, 6)) == "-1/3"


def test_scalar_rejects_garbage():
    with pytest.raises(FormatError):
        parse_scalar("one half")
    with pytest.raises(FormatError):
        parse_scalar("1/0")
    with pytest.raises(FormatError):
        scalar(True)


@given(fractions, fractions)
@settings(max_examples=50, deadline=None)
def test_scalar_arithmetic_is_exact(a, b):
    total = scalar(a) + scalar(b)
    assert parse_scalar(format_scalar(total)) == scalar(a + b)
    assert QQ.denom(total) > 0


def test_rref_examples():
    reduced, pivots = rref(identity(2))
    assert to_rows(reduced) == to_rows(identity(2))
    assert pivots == [0, 1]

    reduced, pivots = rref(matrix_from_rows([[2, 4]]))
    assert to_rows(reduced) == [[1, 2]]
    assert pivots == [0]


def test_rref_of_invertible_is_identity():
    m = matrix_from_rows([[2, 1, 0], [1, 3, 1], [0, 1, 4]])
    assert is_invertible(m)
    reduced, pivots = rref(m)
    assert to_rows(reduced) == to_rows(identity(3))
    assert to_rows(m * inverse(m)) == to_rows(identity(3))


def test_kernel_examples():
    assert kernel_basis(identity(2)) == []
    assert len(kernel_basis(zeros(2, 3))) == 3
    basis = kernel_basis(matrix_from_rows([[1, 1]]))
    assert len(basis) == 1
    assert basis[0][0] == -basis[0][1] != 0


@given(matrices())
@settings(max_examples=60, deadline=None)
def test_kernel_and_rank(rows):
    m = matrix_from_rows(rows)
    basis = kernel_basis(m)
    assert len(basis) == len(rows[0]) - rank(m)
    for v in basis:
        assert all(x == 0 for x in mat_vec(rows, v))
    reduced, _ = rref(m)
    assert rank(reduced) == rank(m)


@given(matrices(), st.lists(small_ints, min_size=4, max_size=4))
@settings(max_examples=60, deadline=None)
def test_solve_is_consistent(rows, x):
    ncols = len(rows[0])
    b = mat_vec(rows, x[:ncols])
    solution = solve(matrix_from_rows(rows), b)
    assert solution is not None
    assert mat_vec(rows, solution) == b


def test_solve_inconsistent_and_prefer_late():
    assert solve(matrix_from_rows([[1, 1], [1, 1]]), [1, 2]) is None
    rows = [{0: QQ(1), 1: QQ(1), 2: QQ(1)}]
    assert sparse_solve(rows, [QQ(1)], 3) == {0: QQ(1)}
    assert sparse_solve(rows, [QQ(1)], 3, prefer_late=True) == {2: QQ(1)}
    with pytest.raises(ShapeError):
        solve(identity(2), [1])


def test_quotient_examples():
    reps, projection, section = quotient_basis(3, [])
    assert reps == [0, 1, 2]
    assert to_rows(projection) == to_rows(identity(3))

    reps, projection, section = quotient_basis(2, [[1, -1]])
    assert reps == [0]
    assert to_rows(projection) == [[1, 1]]

    reps, projection, section = quotient_basis(2, [[1, 0], [0, 1]])
    assert reps == []


@given(st.integers(1, 5).flatmap(lambda n: st.tuples(
    st.just(n), st.lists(st.lists(small_ints, min_size=n, max_size=n), max_size=4))))
@settings(max_examples=60, deadline=None)
def test_quotient_invariants(data):
    n, relations = data
    reps, projection, section = quotient_basis(n, relations)
    assert to_rows(projection * section) == to_rows(identity(len(reps)))
    assert rank(projection) == len(reps)
    for rel in relations:
        assert all(x == 0 for x in mat_vec(to_rows(projection), rel))
    nontrivial = [rel for rel in relations if any(rel)]
    expected = n - (rank(matrix_from_rows(nontrivial)) if nontrivial else 0)
    assert len(reps) == expected


def test_quotient_representatives_are_earliest():
    quotient = sparse_quotient(3, [{0: QQ(1), 2: QQ(-1)}])
    assert quotient.representatives == (0, 1)
    assert quotient.project_index(2) == {0: QQ(1)}


if __name__ == '__main__':
    pytest.main(["test_exactla.py"])
