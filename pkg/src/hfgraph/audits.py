"""Identity audit suites; every check is an exact matrix equality."""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Sequence

from . import diagram as dg
from . import floer, gf2
from .floer import FloerPackage
from .graphcob import (PathTree, check_tree_independence, lasso, pi1_action,
                       relative_h1_action, tree_generators)
from .moves import (Move, MoveProgram, assemble_blocks, eval_move, eval_program,
                    is_product, random_program, spinc_blocks, start_state)
from .textio import load_diagram

__all__ = ["Check", "SUITES", "run_suite", "DEFAULT_MANIFOLDS",
           "thm_d", "thm_e", "loopswap", "functoriality", "spinc", "niceness_oracle"]


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str = ""

    def line(self) -> str:
        tail = f" ({self.detail})" if self.detail else ""
        return f"{'PASS' if self.ok else 'FAIL'} {self.name}{tail}"


def _pkg(m) -> FloerPackage:
    return m if isinstance(m, FloerPackage) else floer.model(m)


def thm_d(manifolds: Sequence = ("S1xS2", "L(3,1)")) -> list[Check]:
    """Basepoint-loop action against (d1)* and the H1 action."""
    out = []
    for m in manifolds:
        P = _pkg(m)
        C = P.C
        one = gf2.identity(P.hf)
        out.append(Check(f"{P.name}: (d1)*^2 = 0", (C @ C).is_zero()))
        s = start_state(P, ["p"])
        for g in P.classes:
            G = P.action(g)
            push, _ = eval_move(s, Move("PUSH", ("p",), g))
            out.append(Check(f"{P.name} {g}: gamma_* = 1 + (d1)*[gamma]", push == one + C @ G))
            out.append(Check(f"{P.name} {g}: (d1)*[gamma] = [gamma](d1)*", C @ G == G @ C))
            out.append(Check(f"{P.name} {g}: gamma_*^2 = 1", push @ push == one))
            out.append(Check(f"{P.name} {g}: pi1_action agrees with push", pi1_action(P, g) == push))
    return out


def _trees(points: Sequence[str], classes: Sequence[str]) -> list[PathTree]:
    a, b, c = points
    g = classes[0] if classes else None
    dec = ((g, 1),) if g else ()
    return [
        PathTree(a, (("u1", b, ()), ("u2", c, ()))),
        PathTree(a, (("u1", b, dec), ("u2", c, ()))),
        PathTree(b, (("v1", a, ()), ("v2", c, dec))),
        PathTree(c, (("w1", a, dec), ("w2", b, dec))),
    ]


def thm_e(manifolds: Sequence = ("S1xS2", "#2S1xS2"), points=("p1", "p2", "p3")) -> list[Check]:
    """Relative H1 action: tree independence, squares and commutators."""
    out = []
    for m in manifolds:
        P = _pkg(m)
        trees = _trees(points, P.classes)
        T0 = trees[0]
        for i, T in enumerate(trees[1:], 1):
            for star in points:
                rep = check_tree_independence(P, T0, T, star)
                out.append(Check(f"{P.name}: tree 0 vs tree {i}, star {star}", rep.ok,
                                 "" if rep.ok else f"mismatch on {rep.first_mismatch}"))
        gens = tree_generators(P, T0)
        acts = {n: relative_h1_action(P, T0, [n]) for n, _ in gens}
        for n, A in acts.items():
            out.append(Check(f"{P.name}: F({n})^2 = 0", (A @ A).is_zero()))
        names = list(acts)
        for i, a in enumerate(names):
            for b in names[i + 1:]:
                out.append(Check(f"{P.name}: F({a}) F({b}) = F({b}) F({a})",
                                 acts[a] @ acts[b] == acts[b] @ acts[a]))
    return out


def loopswap(manifolds: Sequence = ("S1xS2", "#2S1xS2"), points=("p1", "p2", "p3")) -> list[Check]:
    """A loop spliced into any strand gives the same map, in every frame."""
    out = []
    for m in manifolds:
        P = _pkg(m)
        for star in points:
            s = start_state(P, points, star)
            for g in P.classes:
                ref, _ = eval_move(s, Move("LOOP", (points[0],), g))
                for p in points:
                    out.append(Check(f"{P.name} star {star} {g}: lasso on {p} = loop",
                                     lasso(s, p, g) == ref))
                p, q = points[0], points[1]
                sw, s2 = eval_move(s, Move("SWAP", (p, q)))
                sw_back, _ = eval_move(s2, Move("SWAP", (p, q)))
                lp, _ = eval_move(s2, Move("LOOP", (p,), g))
                out.append(Check(f"{P.name} star {star} {g}: swap conjugates the loop",
                                 sw_back @ lp @ sw == ref))
    return out


def functoriality(manifolds: Sequence = ("S1xS2", "S3"), seed: int = 0, count: int = 100,
                  length: int = 12) -> list[Check]:
    """eval(whole) = eval(tail) eval(head) at every split position."""
    rng = random.Random(seed)
    out = []
    for k in range(count):
        man = manifolds[k % len(manifolds)]
        prog = random_program(rng, man, length=rng.randint(1, length))
        whole = eval_program(prog)
        ok = True
        s = prog.start
        states = [s]
        for mv in prog.moves:
            _, s = eval_move(s, mv)
            states.append(s)
        for i in range(1, len(prog.moves)):
            head = MoveProgram(prog.start, prog.moves[:i])
            tail = MoveProgram(states[i], prog.moves[i:])
            if eval_program(tail) @ eval_program(head) != whole:
                ok = False
                break
        out.append(Check(f"program {k} on {man} ({len(prog.moves)} moves)", ok))
    return out


def spinc(manifolds: Sequence = ("L(3,1)", "S1xS2"), seed: int = 0, count: int = 30) -> list[Check]:
    """Product programs have no off-diagonal Spin^c blocks."""
    rng = random.Random(seed)
    out = []
    for m in manifolds:
        P = _pkg(m)
        try:
            P.check()
            out.append(Check(f"{P.name}: package operators are block diagonal", True))
        except ValueError as exc:
            out.append(Check(f"{P.name}: package operators are block diagonal", False, str(exc)))
        name = m if isinstance(m, str) else P
        for k in range(count):
            prog = random_program(rng, name, length=rng.randint(1, 12), product_only=True)
            assert is_product(prog)
            blocks = spinc_blocks(prog)
            off = [c for c, b in blocks if c[0] != c[1] and not b.is_zero()]
            f = eval_program(prog)
            same = assemble_blocks(blocks, f.domain, f.codomain) == f
            out.append(Check(f"{P.name} program {k}: off-diagonal blocks vanish",
                             not off and same, f"nonzero {off}" if off else ""))
    return out


def genus1_fixtures() -> list[str]:
    return ["s3.hd", "s1xs2.hd", "L2_1.hd", "L3_1.hd", "L5_1.hd", "s3_finger.hd",
            "L2_1_finger.hd", "s1xs2_finger.hd"]


def niceness_oracle(fixture_dir=None) -> list[Check]:
    """Nice-region counting against the plane-cover enumeration."""
    base = fixture_dir or floer.FIXTURE_DIR
    out = []
    for fn in genus1_fixtures():
        d = load_diagram(base / fn)
        if dg.admissibility_certificate(d) is not None:
            continue
        plane = floer.d_genus1(d, 1)
        if floer.is_nice(d):
            out.append(Check(f"{fn}: d0 nice = d0 plane", floer.d0_nice(d) == plane.d0))
            for lname, word in d.loops:
                a = floer.h1_action(d, word, "nice")
                b = floer.h1_action(d, word, "plane")
                out.append(Check(f"{fn} {lname}: loop action nice = plane", a == b))
        d0, d1 = plane.d0, plane.d1
        out.append(Check(f"{fn}: d0 d1 + d1 d0 = 0", (d0 @ d1 + d1 @ d0).is_zero()))
    return out


SUITES: dict[str, Callable[..., list[Check]]] = {
    "thmD": thm_d,
    "thmE": thm_e,
    "loopswap": loopswap,
    "functoriality": functoriality,
    "spinc": spinc,
    "niceness-oracle": niceness_oracle,
}

DEFAULT_MANIFOLDS = {
    "thmD": ("S1xS2", "L(3,1)"),
    "thmE": ("S1xS2", "#2S1xS2"),
    "loopswap": ("S1xS2", "#2S1xS2"),
    "functoriality": ("S1xS2", "S3"),
    "spinc": ("L(3,1)", "S1xS2"),
}


def run_suite(name: str, manifolds: Sequence | None = None, seed: int = 0,
              fixture_dir=None) -> list[Check]:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    if name == "niceness-oracle":
        return niceness_oracle(fixture_dir)
    mans = tuple(manifolds) if manifolds else DEFAULT_MANIFOLDS[name]
    if name in ("functoriality", "spinc"):
        return SUITES[name](mans, seed=seed)
    return SUITES[name](mans)
