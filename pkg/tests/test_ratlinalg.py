from fractions import Fraction as Q

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cosetlab.ratlinalg import (
    determinant,
    identity,
    mat,
    mat_inv,
    mat_mul,
    mat_vec,
    smith_normal_form,
    solve,
    transpose,
)


def test_mat_inv_round_trip():
    a = mat([(2, 1), (1, 1)])
    assert mat_mul(a, mat_inv(a)) == identity(2)
    with pytest.raises(ValueError):
        mat_inv(mat([(1, 2), (2, 4)]))


def test_solve_against_known_solution():
    a = mat([(2, 0, 1), (0, 1, 0), (1, 0, 1)])
    x = (Q(3), Q(-2), Q(5))
    b = mat_vec(a, x)
    assert solve(a, b) == x


def test_determinant_values():
    assert determinant(mat([(3,)])) == 3
    assert determinant(mat([(2, -1), (-1, 2)])) == 3
    assert determinant(mat([(1, 2), (2, 4)])) == 0


def test_smith_normal_form_frozen_cases():
    assert smith_normal_form([[3]]) == [3]
    assert smith_normal_form([[1, 0], [0, 1]]) == [1, 1]
    assert smith_normal_form([[2, 0], [0, 3]]) == [1, 6]
    assert smith_normal_form([[4, 0], [0, 6]]) == [2, 12]
    assert smith_normal_form([[3, 1], [1, 3]]) == [1, 8]
    assert smith_normal_form([[0, 1], [1, 0]]) == [1, 1]
    assert smith_normal_form([[2, 0], [0, 0]]) == [2, 0]


@settings(max_examples=150, deadline=None)
@given(
    st.lists(
        st.lists(st.integers(min_value=-6, max_value=6), min_size=3, max_size=3),
        min_size=3,
        max_size=3,
    )
)
def test_smith_normal_form_properties(rows):
    divisors = smith_normal_form(rows)
    nonzero = [d for d in divisors if d != 0]
    # divisibility chain and nonnegativity
    assert all(d >= 0 for d in divisors)
    for a, b in zip(nonzero, nonzero[1:]):
        assert b % a == 0
    # zeros trail the chain
    if 0 in divisors:
        assert all(d == 0 for d in divisors[divisors.index(0):])
    # product of the divisors recovers |det|
    det = determinant(mat(rows))
    prod = 1
    for d in divisors:
        prod *= d
    assert prod == abs(det)
    # invariant under transposition
    assert smith_normal_form(tuple(zip(*rows))) == divisors
