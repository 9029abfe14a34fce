from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hfgraph import gf2
from hfgraph.gf2 import THETA_MINUS, THETA_PLUS


def dense_rank(rows) -> int:
    """Row reduction mod 2 on a dense 0/1 matrix."""
    m = [list(r) for r in rows]
    rank, ncols = 0, len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][c] % 2), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][c] % 2:
                m[i] = [(a + b) % 2 for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


def space(n, prefix="e"):
    return gf2.make_space([f"{prefix}{i}" for i in range(n)])


@st.composite
def maps(draw, n=None, m=None):
    n = draw(st.integers(1, 6)) if n is None else n
    m = draw(st.integers(1, 6)) if m is None else m
    dom, cod = space(n, "a"), space(m, "b")
    cols = [draw(st.sets(st.sampled_from(cod.labels))) for _ in range(n)]
    return gf2.Gf2Map(dom, cod, tuple(cols))


@st.composite
def invertible(draw, n):
    sp = space(n)
    f = gf2.identity(sp)
    for _ in range(draw(st.integers(0, 3 * n))):
        i = draw(st.integers(0, n - 1))
        j = draw(st.integers(0, n - 1))
        if i == j:
            continue
        e = gf2.from_dict(sp, sp, {l: [l] for l in sp.labels} | {sp.labels[j]: [sp.labels[j], sp.labels[i]]})
        f = e @ f
    return f


@st.composite
def differentials(draw):
    """Conjugates of a standard square-zero map; returns (d, expected rank)."""
    n = draw(st.integers(1, 7))
    sp = space(n)
    k = draw(st.integers(0, n // 2))
    J = gf2.from_dict(sp, sp, {sp.labels[2 * i]: [sp.labels[2 * i + 1]] for i in range(k)})
    P = draw(invertible(n))
    # P has finite order, so its inverse is the last power before the identity
    Q, inv = P, gf2.identity(sp)
    while Q != gf2.identity(sp):
        inv = Q
        Q = Q @ P
    return inv @ J @ P, n - 2 * k


def test_identity_and_zero():
    sp = space(3)
    one = gf2.identity(sp)
    assert one @ one == one
    assert (one + one).is_zero()
    assert gf2.zero(sp).is_zero()


def test_column_validation():
    sp = space(2)
    with pytest.raises(ValueError):
        gf2.Gf2Map(sp, sp, (frozenset(["nope"]), frozenset()))
    with pytest.raises(ValueError):
        gf2.Gf2Map(sp, sp, (frozenset(),))


def test_compose_shape_mismatch():
    with pytest.raises(ValueError):
        gf2.identity(space(2)) @ gf2.identity(space(3))


@given(maps(), st.data())
def test_compose_matches_dense_product(f, data):
    g = data.draw(maps(n=f.codomain.dim))
    g = gf2.Gf2Map(f.codomain, g.codomain, g.columns)
    h = g @ f
    A, B = f.rows(), g.rows()
    prod = [[sum(B[i][k] * A[k][j] for k in range(len(A))) % 2 for j in range(f.domain.dim)]
            for i in range(g.codomain.dim)]
    assert h.rows() == prod


@given(maps(), maps())
def test_tensor_is_kronecker(f, g):
    t = gf2.tensor(f, g)
    A, B = f.rows(), g.rows()
    kron = [[A[i // len(B)][j // len(B[0])] * B[i % len(B)][j % len(B[0])]
             for j in range(len(A[0]) * len(B[0]))] for i in range(len(A) * len(B))]
    assert t.rows() == kron


def test_tensor_label_order():
    V = gf2.make_space([THETA_PLUS, THETA_MINUS])
    W = gf2.tensor_spaces(gf2.make_space(["x", "y"]), V)
    assert W.labels == ("x⊗θ+", "x⊗θ-", "y⊗θ+", "y⊗θ-")


@settings(max_examples=60)
@given(differentials())
def test_homology_rank_matches_dense_oracle(dr):
    d, expected = dr
    h = gf2.homology(d)
    rank_d = dense_rank(d.rows())
    assert h.rank == d.domain.dim - 2 * rank_d == expected
    # section lands in cycles; projection∘section = 1; boundaries project to zero
    assert (d @ h.section).is_zero()
    assert h.projection @ h.section == gf2.identity(h.space)
    assert (h.projection @ d).is_zero()


def test_homology_rejects_non_differential():
    sp = space(2)
    f = gf2.from_dict(sp, sp, {"e0": ["e1"], "e1": ["e0"]})
    with pytest.raises(ValueError):
        gf2.homology(f)


@settings(max_examples=40)
@given(differentials())
def test_transport_is_functorial(dr):
    d, _ = dr
    h = gf2.homology(d)
    one = gf2.identity(d.domain)
    assert h.transport(one) == gf2.identity(h.space)
    assert h.transport(d).is_zero()
    f = one + d
    assert h.transport(f @ f) == h.transport(f) @ h.transport(f)


def test_transport_rejects_non_chain_map():
    sp = space(2)
    d = gf2.from_dict(sp, sp, {"e0": ["e1"]})
    f = gf2.from_dict(sp, sp, {"e1": ["e0"]})
    with pytest.raises(ValueError):
        gf2.homology(d).transport(f)


@given(maps())
def test_format_parse_roundtrip(f):
    assert gf2.parse_map(gf2.format_map(f), f.domain, f.codomain) == f


def test_block_assemble_extract_roundtrip():
    base = space(2)
    sp = base
    blocks = [[gf2.identity(sp), gf2.from_dict(sp, sp, {"e0": ["e1"]})],
              [gf2.zero(sp), gf2.identity(sp)]]
    f = gf2.block_assemble(blocks)
    for i in range(2):
        for j in range(2):
            assert gf2.block_extract(f, i, j) == blocks[i][j]
    assert f.column("e0⊗θ-") == frozenset({"e0⊗θ-", "e1⊗θ+"})


def test_relabel():
    sp = space(2)
    f = gf2.from_dict(sp, sp, {"e0": ["e1"]})
    g = gf2.relabel(f, {"e0": "x", "e1": "y"}, {"e0": "x", "e1": "y"})
    assert g.entry("y", "x") == 1 and g.entry("x", "y") == 0
