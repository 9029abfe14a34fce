from __future__ import annotations

import itertools
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import invariant_factors

from hfgraph import zlinalg

small = st.integers(-4, 4)


@st.composite
def matrices(draw, max_rows=4, max_cols=4):
    m = draw(st.integers(1, max_rows))
    n = draw(st.integers(1, max_cols))
    return [[draw(small) for _ in range(n)] for _ in range(m)]


def det(a):
    return int(Matrix(a).det())


@settings(max_examples=80)
@given(matrices())
def test_snf_matches_sympy_invariants(a):
    d, u, v = zlinalg.smith_normal_form(a)
    assert zlinalg.matmul(zlinalg.matmul(u, a), v) == d
    assert abs(det(u)) == 1 and abs(det(v)) == 1
    diag = [d[i][i] for i in range(min(len(d), len(d[0])))]
    for i in range(len(d)):
        for j in range(len(d[0])):
            if i != j:
                assert d[i][j] == 0
    nonzero = [abs(x) for x in diag if x]
    for x, y in zip(nonzero, nonzero[1:]):
        assert y % x == 0
    oracle = [abs(int(x)) for x in invariant_factors(Matrix(a), domain=ZZ) if x]
    assert nonzero == oracle


@settings(max_examples=60)
@given(matrices(), st.data())
def test_solve_integer(a, data):
    n = len(a[0])
    x0 = [data.draw(small) for _ in range(n)]
    b = [sum(r[i] * x0[i] for i in range(n)) for r in a]
    sol = zlinalg.solve_integer(a, b)
    assert sol is not None
    x, kernel = sol
    assert [sum(r[i] * x[i] for i in range(n)) for r in a] == b
    for k in kernel:
        assert all(sum(r[i] * k[i] for i in range(n)) == 0 for r in a)
    assert len(kernel) == n - Matrix(a).rank()


def test_solve_integer_detects_no_solution():
    assert zlinalg.solve_integer([[2, 0]], [1]) is None
    assert zlinalg.solve_integer([[1, 1], [1, 1]], [0, 1]) is None


def test_quotient_coords_cyclic():
    inv, v = zlinalg.quotient_coords([[3]], 1)
    assert inv == [3]
    inv, v = zlinalg.quotient_coords([[1, 1]], 2)
    assert inv == [0]
    inv, v = zlinalg.quotient_coords([], 2)
    assert inv == [0, 0]


def brute_feasible(a, b, n, box=4):
    for x in itertools.product(range(-box, box + 1), repeat=n):
        if all(sum(r[i] * x[i] for i in range(n)) >= bb for r, bb in zip(a, b)):
            yield x


@settings(max_examples=60)
@given(st.integers(1, 2), st.data())
def test_fm_feasible_point_agrees_with_enumeration(n, data):
    rows = data.draw(st.integers(1, 4))
    a = [[data.draw(st.integers(-3, 3)) for _ in range(n)] for _ in range(rows)]
    # box constraints keep the enumeration exhaustive
    for i in range(n):
        e = [0] * n
        e[i] = 1
        a.append(e)
        a.append([-x for x in e])
    b = [data.draw(st.integers(-3, 3)) for _ in range(rows)] + [-4, -4] * n
    pt = zlinalg.fm_feasible_point(a, b, n)
    lattice = list(brute_feasible(a, b, n))
    if lattice:
        assert pt is not None
    if pt is not None:
        assert all(sum(Fraction(r[i]) * pt[i] for i in range(n)) >= bb for r, bb in zip(a, b))


def test_fm_bounds():
    # 0 <= x <= 3, x + y >= 1, y <= 2
    a = [[1, 0], [-1, 0], [1, 1], [0, -1]]
    b = [0, -3, 1, -2]
    assert zlinalg.fm_bounds(a, b, 2, 0) == (0, 3)
    lo, hi = zlinalg.fm_bounds(a, b, 2, 1)
    assert lo == -2 and hi == 2
    assert zlinalg.fm_bounds([[1], [-1]], [2, -1], 1, 0) is False
    assert zlinalg.fm_bounds([[1]], [0], 1, 0) == (0, None)
