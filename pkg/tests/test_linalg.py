from fractions import Fraction
from itertools import combinations
from math import gcd

import pytest
from hypothesis import given
from hypothesis import strategies as st

from toricmirror import kernels
from toricmirror import _kernels_py
from toricmirror.linalg import (
    INFINITE,
    SparseSystem,
    TwoForm,
    det,
    group_index,
    is_prime,
    matmul,
    nullspace,
    nullspace_mod_p,
    primes_up_to,
    primitive_part,
    rank,
    rank_mod_p,
    smith_normal_form,
    solve,
    wedge_contract,
)

small = st.integers(-6, 6)


def matrices(max_rows=4, max_cols=4):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


def _minor_gcd(m, k):
    g = 0
    for rows in combinations(range(len(m)), k):
        for cols in combinations(range(len(m[0])), k):
            g = gcd(g, int(det([[m[i][j] for j in cols] for i in rows])))
    return g


# -- Smith normal form -----------------------------------------------------


def test_snf_identity():
    assert smith_normal_form([[1, 0], [0, 1]])[0] == [1, 1]


def test_snf_example():
    assert smith_normal_form([[2, 4], [6, 8]])[0] == [2, 4]


def test_snf_zero():
    assert smith_normal_form([[0, 0, 0], [0, 0, 0]])[0] == [0, 0]


@pytest.mark.parametrize(
    "m, diag",
    [
        # frozen from an independent computer-algebra Smith form
        ([[0, 4], [-6, -5], [2, -5]], [1, 8]),
        ([[-6, 2, -3, -6], [-5, 0, 0, -5], [-3, -5, 2, 0]], [1, 1, 5]),
        ([[-5, -3, 4, 4], [3, -6, 3, 3]], [1, 3]),
        ([[-3, -6], [2, -4], [-2, 0]], [1, 4]),
    ],
)
def test_snf_frozen_oracle(m, diag):
    assert smith_normal_form(m)[0] == diag


@given(matrices())
def test_snf_transforms_and_divisibility(m):
    diag, left, right = smith_normal_form(m)
    prod = matmul(matmul(left, m), right)
    for i, row in enumerate(prod):
        for j, v in enumerate(row):
            assert v == (diag[i] if i == j else 0)
    assert abs(det(left)) == 1 and abs(det(right)) == 1
    assert all(d >= 0 for d in diag)
    for a, b in zip(diag, diag[1:]):
        assert (a == 0 and b == 0) or (a != 0 and b % a == 0)


@given(matrices(3, 3))
def test_snf_minor_gcds(m):
    diag = smith_normal_form(m)[0]
    prod = 1
    for k in range(1, len(diag) + 1):
        prod *= diag[k - 1]
        assert prod == _minor_gcd(m, k)


# -- group index, primitive part, primes ----------------------------------


def test_group_index_examples():
    assert group_index([(1, 0), (0, 1)], 2) == 1
    assert group_index([(1, 1), (1, -1)], 2) == 2
    assert group_index([(1, 0)], 2) == INFINITE


@given(st.lists(st.tuples(small, small), min_size=2, max_size=5))
def test_group_index_matches_minor_gcd(gens):
    idx = group_index(gens, 2)
    g = _minor_gcd([list(v) for v in gens], 2)
    assert idx == (INFINITE if g == 0 else g)


def test_primitive_part():
    assert primitive_part((2, 4)) == (1, 2)
    assert primitive_part((-3, 0, 6)) == (-1, 0, 2)
    assert primitive_part((1, 1)) == (1, 1)
    with pytest.raises(ValueError):
        primitive_part((0, 0))


def test_primes():
    assert primes_up_to(30) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert is_prime(2_147_483_647) and not is_prime(1) and not is_prime(91)


# -- two-forms --------------------------------------------------------------


def test_wedge_contract_convention():
    assert wedge_contract(TwoForm.wedge(2, 0, 1), [1, 0]) == [0, 1]


def test_wedge_contract_zero():
    zero = TwoForm(((0, 0), (0, 0)))
    assert wedge_contract(zero, [3, 4]) == [0, 0]


def test_wedge_contract_three_dim():
    alpha = TwoForm.wedge(3, 0, 1) + TwoForm.wedge(3, 1, 2)
    assert wedge_contract(alpha, [0, 1, 0]) == [-1, 0, 1]


def test_two_form_rejects_symmetric():
    with pytest.raises(ValueError):
        TwoForm(((0, 1), (1, 0)))


@given(st.lists(small, min_size=3, max_size=3))
def test_wedge_contract_self_vanishes(p):
    # alpha(p, p) = 0 for every two-form
    alpha = TwoForm.wedge(3, 0, 1) + TwoForm.wedge(3, 0, 2) + TwoForm.wedge(3, 1, 2)
    v = wedge_contract(alpha, p)
    assert sum(a * b for a, b in zip(v, p)) == 0


# -- ranks, kernels, solving ----------------------------------------------


@given(matrices(5, 5))
def test_rank_matches_nullspace(m):
    r = rank(m)
    assert r + len(nullspace(m)) == len(m[0])


@given(matrices(5, 5), st.sampled_from([2, 3, 5, 7, 101]))
def test_rank_mod_p_backends_agree(m, p):
    assert _kernels_py.rank_mod_p([row[:] for row in m], p) == kernels.rank_mod_p([row[:] for row in m], p)


@given(matrices(5, 5), st.sampled_from([2, 3, 5]))
def test_rank_mod_p_bounded_by_rank(m, p):
    assert rank_mod_p(m, p) <= rank(m)
    assert rank_mod_p(m, p) + len(nullspace_mod_p(m, p)) == len(m[0])


@given(matrices(4, 4), st.lists(small, min_size=4, max_size=4))
def test_solve_satisfies_system(m, x):
    n = len(m[0])
    rhs = [sum(Fraction(a) * b for a, b in zip(row, x[:n])) for row in m]
    sol = solve(m, rhs)
    assert sol is not None
    assert [sum(a * b for a, b in zip(row, sol)) for row in m] == rhs


def test_sparse_system_contradiction():
    s = SparseSystem()
    s.add({"x": 1, "y": 1}, 1)
    s.add({"x": 1}, 0)
    assert s.consistent
    s.add({"y": 1}, 2, label="bad")
    assert not s.consistent and s.contradiction == "bad"


def test_sparse_system_solution_mod_p():
    s = SparseSystem(7)
    s.add({"x": 3}, 1)
    assert s.solution()["x"] * 3 % 7 == 1
