"""Integer and rational linear algebra helpers.

Smith normal form with transforms, integer linear systems, and exact
Fourier-Motzkin elimination for small polyhedra.
"""
from __future__ import annotations

from fractions import Fraction
from math import ceil, floor
from typing import Sequence

__all__ = [
    "smith_normal_form", "solve_integer", "integer_kernel", "quotient_coords",
    "fm_feasible_point", "fm_bounds", "matmul", "transpose",
]

Matrix = list[list[int]]


def _ident(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(a: Matrix) -> Matrix:
    return [list(r) for r in zip(*a)] if a else []


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def smith_normal_form(a: Sequence[Sequence[int]], ncols: int | None = None):
    """Return (D, U, V) with D = U A V diagonal, diagonal entries dividing.

    U and V are unimodular. ``ncols`` is needed when A has no rows.
    """
    m = len(a)
    n = len(a[0]) if m else (ncols or 0)
    d = [list(map(int, r)) for r in a]
    u = _ident(m)
    v = _ident(n)

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in d:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def add_row(src, dst, k):  # row dst += k * row src
        d[dst] = [x + k * y for x, y in zip(d[dst], d[src])]
        u[dst] = [x + k * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, k):
        for r in d:
            r[dst] += k * r[src]
        for r in v:
            r[dst] += k * r[src]

    t = 0
    while t < min(m, n):
        nz = [(abs(d[i][j]), i, j) for i in range(t, m) for j in range(t, n) if d[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            for i in range(t + 1, m):
                if d[i][t]:
                    q = d[i][t] // d[t][t]
                    add_row(t, i, -q)
                    if d[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, n):
                if d[t][j]:
                    q = d[t][j] // d[t][t]
                    add_col(t, j, -q)
                    if d[t][j]:
                        swap_cols(t, j)
                        done = False
            if done:
                bad = [(i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                       if d[i][j] % d[t][t]]
                if not bad:
                    break
                add_row(bad[0][0], t, 1)
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return d, u, v


def _rank_of_snf(d: Matrix) -> int:
    r = 0
    while r < min(len(d), len(d[0]) if d else 0) and d[r][r]:
        r += 1
    return r


def solve_integer(a: Matrix, b: Sequence[int], ncols: int | None = None):
    """Integer solutions of A x = b as (particular, kernel basis) or None."""
    m = len(a)
    n = len(a[0]) if m else (ncols or 0)
    d, u, v = smith_normal_form(a, n)
    r = _rank_of_snf(d) if m else 0
    ub = [sum(x * y for x, y in zip(row, b)) for row in u]
    y = [0] * n
    for i in range(m):
        if i < r:
            if ub[i] % d[i][i]:
                return None
            y[i] = ub[i] // d[i][i]
        elif ub[i]:
            return None
    x = [sum(v[i][k] * y[k] for k in range(n)) for i in range(n)]
    kernel = [[v[i][k] for i in range(n)] for k in range(r, n)]
    return x, kernel


def integer_kernel(a: Matrix, ncols: int | None = None) -> Matrix:
    m = len(a)
    n = len(a[0]) if m else (ncols or 0)
    return solve_integer(a, [0] * m, n)[1]


def quotient_coords(relations: Matrix, nvars: int):
    """Present Z^nvars / rowspan(relations).

    Returns (invariants, V) where invariants[i] is the order of the i-th
    cyclic factor (0 for Z) and a vector x maps to (x V)_i mod invariants[i].
    Trivial factors (order 1) are dropped.
    """
    d, _u, v = smith_normal_form(relations, nvars)
    diag = [d[i][i] if i < len(d) else 0 for i in range(nvars)]
    keep = [i for i in range(nvars) if diag[i] != 1]
    inv = [diag[i] for i in keep]
    vk = [[v[r][i] for i in keep] for r in range(nvars)]
    return inv, vk


def _fm_step(rows, k):
    """Eliminate variable k from rows (a, b) meaning a.x >= b."""
    pos, neg, zero = [], [], []
    for a, b in rows:
        (pos if a[k] > 0 else neg if a[k] < 0 else zero).append((a, b))
    out = list(zero)
    for ap, bp in pos:
        for an, bn in neg:
            cp, cn = -an[k], ap[k]
            a = [cp * x + cn * y for x, y in zip(ap, an)]
            out.append((a, cp * bp + cn * bn))
    # drop duplicates
    seen, uniq = set(), []
    for a, b in out:
        key = (tuple(a), b)
        if key not in seen:
            seen.add(key)
            uniq.append((a, b))
    return uniq


def _bounds_for(rows, k, values):
    lo, hi = None, None
    for a, b in rows:
        rest = b - sum(a[i] * values[i] for i in values)
        if a[k] > 0:
            val = Fraction(rest, 1) / a[k]
            lo = val if lo is None or val > lo else lo
        elif a[k] < 0:
            val = Fraction(rest, 1) / a[k]
            hi = val if hi is None or val < hi else hi
    return lo, hi


def fm_feasible_point(a: Matrix, b: Sequence, nvars: int):
    """A rational point x with A x >= b, or None. Exact arithmetic."""
    rows = [([Fraction(v) for v in r], Fraction(bb)) for r, bb in zip(a, b)]
    stages = [rows]
    for k in range(nvars):
        rows = _fm_step(rows, k)
        stages.append(rows)
    for r, bb in rows:
        if bb > 0:
            return None
    values: dict[int, Fraction] = {}
    for k in reversed(range(nvars)):
        lo, hi = _bounds_for(stages[k], k, values)
        if lo is not None and hi is not None and lo > hi:
            return None
        if lo is None and hi is None:
            x = Fraction(0)
        elif lo is None:
            x = min(Fraction(0), Fraction(floor(hi)))
        elif hi is None:
            x = max(Fraction(0), Fraction(ceil(lo)))
        else:
            x = Fraction(ceil(lo)) if ceil(lo) <= hi else lo
        values[k] = x
    return [values[k] for k in range(nvars)]


def fm_bounds(a: Matrix, b: Sequence, nvars: int, k: int):
    """Exact (lower, upper) bounds of x_k over {A x >= b}; None if unbounded.

    Returns False when the system is infeasible.
    """
    rows = [([Fraction(v) for v in r], Fraction(bb)) for r, bb in zip(a, b)]
    for j in range(nvars):
        if j != k:
            rows = _fm_step(rows, j)
    lo, hi = None, None
    for r, bb in rows:
        if r[k] == 0:
            if bb > 0:
                return False
            continue
        val = bb / r[k]
        if r[k] > 0:
            lo = val if lo is None or val > lo else lo
        else:
            hi = val if hi is None or val < hi else hi
    if lo is not None and hi is not None and lo > hi:
        return False
    return lo, hi
