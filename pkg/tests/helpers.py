"""Synthetic packages with nonzero (d1)* for exercising the move algebra.

Operators are sums of nonconstant monomials in commuting nilpotents N_i on
V^{⊗m}; over GF(2) every such sum squares to zero and they all commute, so
any choice gives a consistent package.
"""
from __future__ import annotations

import itertools
import random

from hfgraph import gf2
from hfgraph.floer import FloerPackage
from hfgraph.gf2 import THETA_MINUS, THETA_PLUS

V = gf2.make_space([THETA_PLUS, THETA_MINUS])
N = gf2.from_dict(V, V, {THETA_PLUS: [THETA_MINUS]})
ONE = gf2.identity(V)


def monomial(m: int, slots) -> gf2.Gf2Map:
    out = None
    for i in range(m):
        f = N if i in slots else ONE
        out = f if out is None else gf2.tensor(out, f)
    return out


def build(m: int, C_terms, class_terms, name="SYN") -> FloerPackage:
    def op(terms):
        f = gf2.zero(monomial(m, ()).domain)
        for t in terms:
            f = f + monomial(m, t)
        return f

    C = op(C_terms)
    hf = C.domain
    h1 = tuple((f"g{i + 1}", op(t)) for i, t in enumerate(class_terms))
    return FloerPackage(name, hf, C, h1, tuple((l, "0") for l in hf.labels),
                        tuple((n, False) for n, _ in h1))


def synthetic() -> FloerPackage:
    """C = N⊗1, g1 = 1⊗N, g2 = N⊗N, g3 = N⊗1 + 1⊗N."""
    return build(2, [{0}], [[{1}], [{0, 1}], [{0}, {1}]])


def random_package(rng: random.Random, m: int = 2, nclasses: int = 2) -> FloerPackage:
    monos = [set(c) for r in range(1, m + 1) for c in itertools.combinations(range(m), r)]

    def pick():
        return [t for t in monos if rng.random() < 0.5]

    return build(m, pick(), [pick() for _ in range(nclasses)], "RND")
