"""Acceptance criteria, one test each; every test prints a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v`` (or execute this file directly)
to see the lines.
"""
from __future__ import annotations

import random
import time

import pytest

from helpers import synthetic
from hfgraph import diagram as dg
from hfgraph import floer, gf2
from hfgraph.floer import FIXTURE_DIR, model
from hfgraph.gf2 import THETA_MINUS as TM, THETA_PLUS as TP
from hfgraph.graphcob import (PathTree, check_tree_independence, compile,
                              evaluate_trace, lasso, parse_trace, relative_h1_action,
                              tree_generators)
from hfgraph.moves import (Move, MoveProgram, eval_move, eval_program,
                           random_program, spinc_blocks, start_state, transition)
from hfgraph.textio import load_diagram

BUDGET = 10.0
GENUS1 = ["s3.hd", "s1xs2.hd", "L2_1.hd", "L3_1.hd", "L5_1.hd",
          "s3_finger.hd", "L2_1_finger.hd", "s1xs2_finger.hd"]


def report(capsys, n, title, fn):
    t0 = time.perf_counter()
    problems = fn()
    dt = time.perf_counter() - t0
    ok = not problems and dt < BUDGET
    line = f"CRITERION {n} {'PASS' if ok else 'FAIL'} {title} ({dt:.2f}s)"
    if problems:
        line += " :: " + "; ".join(problems[:3])
    if dt >= BUDGET:
        line += " :: over time budget"
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


def ev(s, kind, *args, via=None):
    return eval_move(s, Move(kind, tuple(args), via))


# 1 ------------------------------------------------------------------------------

def criterion1():
    problems = []
    for man in ("S3", "S1xS2", "#2S1xS2"):
        s = start_state(man, ["p"])
        base = s.base.labels
        C = s.manifold.C
        f, s2 = ev(s, "CREATE", "q", "p")
        want = {x: {f"{x}⊗{TP}"} for x in base}
        if any(f.column(x) != want[x] for x in base):
            problems.append(f"{man}: creation")
        g, _ = ev(s2, "TERM", "q")
        if any(g.column(f"{x}⊗{TM}") != {x} or g.column(f"{x}⊗{TP}") for x in base):
            problems.append(f"{man}: termination")
        h, s4 = ev(s, "SPLIT", "p", "q")
        if any(h.column(x) != {f"{x}⊗{TM}"} for x in base):
            problems.append(f"{man}: splitting")
        k, _ = ev(s4, "MERGE", "p", "q")
        if any(k.column(f"{x}⊗{TP}") != {x} or k.column(f"{x}⊗{TM}") for x in base):
            problems.append(f"{man}: merging")
        sw, _ = ev(s4, "SWAP", "p", "q")
        for x in base:
            if sw.column(f"{x}⊗{TP}") != {f"{x}⊗{TP}"} | {f"{y}⊗{TM}" for y in C.column(x)}:
                problems.append(f"{man}: swap on θ+")
            if sw.column(f"{x}⊗{TM}") != {f"{x}⊗{TM}"}:
                problems.append(f"{man}: swap on θ-")
    return problems


def test_criterion_1_model_formulas(capsys):
    report(capsys, 1, "single-move programs reproduce the model maps", criterion1)


# 2 ------------------------------------------------------------------------------

VANISHING = {
    "nullhomotopic loop": "start p\nend p\nTRI p -> p q\nTRI p q -> p\n",
    "free arc": "start p\nend p\nVSTART q\nVEND q\n",
    "isolated loop": "start p\nend p\nVSTART q\nTRI q -> q r\nTRI q r -> q\nVEND q\n",
}


def fixture_packages():
    pk = [model(n) for n in ("S3", "S1xS2", "#2S1xS2", "L(2,1)", "L(3,1)", "L(5,1)")]
    for p in sorted(FIXTURE_DIR.glob("*.hd")):
        d = load_diagram(p)
        if dg.admissibility_certificate(d) is None:
            pk.append(floer.package(d, 1, p.stem))
    return pk


NO_D1 = []


def criterion2():
    problems = []
    NO_D1.clear()
    for P in fixture_packages():
        for name, text in VANISHING.items():
            t = parse_trace(text)
            if not evaluate_trace(t, P).is_zero():
                problems.append(f"{P.name}: {name}")
            # second route: compile and evaluate move by move; a split off a
            # non-star strand needs (d1)*, which genus > 1 diagrams do not carry
            try:
                prog = compile(t, P, allow_isolated=True)
            except ValueError as exc:
                if "not available" not in str(exc):
                    raise
                NO_D1.append(f"{P.name}/{name}")
                continue
            if not eval_program(prog).is_zero():
                problems.append(f"{P.name}: {name} (compiled)")
    return problems


def test_criterion_2_vanishing(capsys):
    report(capsys, 2, "nullhomotopic loop, free arc, isolated loop evaluate to zero", criterion2)
    if NO_D1:
        with capsys.disabled():
            print("  compiled route skipped (no (d1)*): " + ", ".join(NO_D1))


# 3 ------------------------------------------------------------------------------

def thm_d_problems(P):
    problems = []
    C = P.C
    one = gf2.identity(P.hf)
    s = start_state(P, ["p"])
    if not (C @ C).is_zero():
        problems.append(f"{P.name}: (d1)*^2 != 0")
    for g in P.classes:
        G = P.action(g)
        push, _ = ev(s, "PUSH", "p", via=g)
        if push != one + C @ G:
            problems.append(f"{P.name} {g}: gamma_* != 1 + (d1)*[gamma]")
        if C @ G != G @ C:
            problems.append(f"{P.name} {g}: (d1)* and [gamma] do not commute")
        if push @ push != one:
            problems.append(f"{P.name} {g}: gamma_*^2 != 1")
    return problems


def criterion3():
    problems = []
    for P in (model("S1xS2"), model("L(3,1)"), synthetic()):
        problems += thm_d_problems(P)
    return problems


def test_criterion_3_basepoint_loop_action(capsys):
    report(capsys, 3, "gamma_* = 1 + (d1)*[gamma] and companions", criterion3)


# 4 ------------------------------------------------------------------------------

def criterion4():
    problems = []
    for P in (model("S1xS2"), synthetic()):
        one, z = gf2.identity(P.hf), gf2.zero(P.hf)
        T = gf2.block_assemble([[one, z], [P.C, one]])
        for g in P.classes:
            G = P.action(g)
            gstar = one + P.C @ G
            s = start_state(P, ["p", "q"], "q")
            m1, _ = ev(s, "PUSH", "p", via=g)
            if m1 != gf2.block_assemble([[one, G], [z, one]]):
                problems.append(f"{P.name} {g}: M1")
            s2 = start_state(P, ["p", "q"], "p")
            m2, _ = ev(s2, "PUSH", "p", via=g)
            if m2 != gf2.block_assemble([[gstar, G], [z, gstar]]):
                problems.append(f"{P.name} {g}: M2")
            t, _ = transition(s, "p")
            if t != T:
                problems.append(f"{P.name}: transition is not [[1,0],[C,1]]")
            if T @ m1 != m2 @ T:
                problems.append(f"{P.name} {g}: conjugation does not relate M1 and M2")
    return problems


def test_criterion_4_two_strand_loop(capsys):
    report(capsys, 4, "M1 = [[1,[g]],[0,1]], M2 = [[g*,[g]],[0,g*]], related by transition", criterion4)


# 5 ------------------------------------------------------------------------------

def criterion5():
    problems = []
    pts = ("p1", "p2", "p3")
    for P in (model("S1xS2"), synthetic()):
        g, h = P.classes[0], P.classes[-1]
        for star in pts:
            s = start_state(P, pts, star)
            for c in P.classes:
                ref, _ = ev(s, "LOOP", "p1", via=c)
                for p in pts:
                    if lasso(s, p, c) != ref:
                        problems.append(f"{P.name}: loop on {p} differs (star {star})")
        T0 = PathTree("p1", (("a", "p2", ()), ("b", "p3", ())))
        moves = [
            PathTree("p1", (("a", "p2", ((g, 1),)), ("b", "p3", ()))),       # reroute an arc
            PathTree("p2", (("a", "p1", ()), ("b", "p3", ((h, 1),)))),       # change the root
            PathTree("p3", (("a", "p1", ((g, 1),)), ("b", "p2", ((h, -1),)))),  # both at once
        ]
        for i, T in enumerate(moves):
            for star in pts:
                rep = check_tree_independence(P, T0, T, star)
                if not rep.ok:
                    problems.append(f"{P.name}: tree move {i + 1} fails on {rep.first_mismatch}")
        acts = [relative_h1_action(P, T0, [n]) for n, _ in tree_generators(P, T0)]
        for a in acts:
            if not (a @ a).is_zero():
                problems.append(f"{P.name}: F(eta)^2 != 0")
            for b in acts:
                if a @ b != b @ a:
                    problems.append(f"{P.name}: F(eta) do not commute")
    return problems


def test_criterion_5_loopswap_and_trees(capsys):
    report(capsys, 5, "loop-swap and tree independence on three basepoints", criterion5)


# 6 ------------------------------------------------------------------------------

def criterion6():
    problems = []
    rng = random.Random(20240601)
    mans = ["S1xS2", "S3", "L(2,1)", synthetic()]
    for k in range(120):
        man = mans[k % len(mans)]
        prog = random_program(rng, man, length=rng.randint(2, 12))
        whole = eval_program(prog)
        states = [prog.start]
        for m in prog.moves:
            states.append(eval_move(states[-1], m)[1])
        for i in range(1, len(prog.moves)):
            head = eval_program(MoveProgram(prog.start, prog.moves[:i]))
            tail = eval_program(MoveProgram(states[i], prog.moves[i:]))
            if tail @ head != whole:
                problems.append(f"program {k} split at {i}")
    return problems


def test_criterion_6_functoriality_fuzz(capsys):
    report(capsys, 6, "eval(whole) = eval(tail) eval(head) on 120 random programs", criterion6)


# 7 ------------------------------------------------------------------------------

def criterion7():
    problems = []
    for p in sorted(FIXTURE_DIR.glob("*.hd")):
        d = load_diagram(p)
        if dg.admissibility_certificate(d) is not None:
            continue
        pkg = floer.package(d, 1)
        if not (pkg.chain.d0 @ pkg.chain.d0).is_zero():
            problems.append(f"{p.name}: d0^2 != 0")
    for name in GENUS1:
        d = load_diagram(FIXTURE_DIR / name)
        if floer.is_nice(d) and floer.d0_nice(d) != floer.d_genus1(d, 0).d0:
            problems.append(f"{name}: nice count differs from plane cover")
    expect = {"s3.hd": (1, 1), "s1xs2.hd": (2, 1), "L2_1.hd": (2, 2), "L3_1.hd": (3, 3),
              "L5_1.hd": (5, 5)}
    for name, (rank, ncls) in expect.items():
        pkg = floer.package(load_diagram(FIXTURE_DIR / name))
        if pkg.rank != rank or len(pkg.spinc_classes()) != ncls:
            problems.append(f"{name}: rank {pkg.rank}, classes {len(pkg.spinc_classes())}")
    if dg.h1_and_spinc(load_diagram(FIXTURE_DIR / "s1xs2.hd")).is_finite:
        problems.append("S1xS2 should have infinitely many Spin^c classes")
    return problems


def test_criterion_7_diagram_oracles(capsys):
    report(capsys, 7, "d0^2 = 0, nice = plane cover, ranks and Spin^c counts", criterion7)


# 8 ------------------------------------------------------------------------------

def criterion8():
    problems = []
    rng = random.Random(7)
    for man in ("L(3,1)", "L(5,1)", "S1xS2#L(3,1)", "L(2,1)#L(2,1)"):
        for k in range(25):
            prog = random_program(rng, man, length=rng.randint(1, 10), product_only=True)
            for (so, si), block in spinc_blocks(prog):
                if so != si and not block.is_zero():
                    problems.append(f"{man} program {k}: block {so} <- {si}")
    return problems


def test_criterion_8_spinc_blocks(capsys):
    report(capsys, 8, "product programs are Spin^c block diagonal", criterion8)


# 9 ------------------------------------------------------------------------------

def criterion9():
    problems = []
    for name in GENUS1:
        d = load_diagram(FIXTURE_DIR / name)
        data = floer.d_genus1(d, 1)
        if not (data.d0 @ data.d1 + data.d1 @ data.d0).is_zero():
            problems.append(f"{name}: d0 d1 + d1 d0 != 0")
        hom = gf2.homology(data.d0)
        pkg = floer.package(d, 1)
        if hom.transport(data.d1) != pkg.C:
            problems.append(f"{name}: transported d1 differs from the package")
    for name in ("s1xs2.hd", "L3_1.hd", "s1xs2_finger.hd"):
        problems += thm_d_problems(floer.package(load_diagram(FIXTURE_DIR / name), 1, name))
    return problems


def test_criterion_9_d1_consistency(capsys):
    report(capsys, 9, "d0 d1 + d1 d0 = 0 and transported (d1)* satisfies criterion 3", criterion9)


if __name__ == "__main__":
    for i, fn in enumerate([criterion1, criterion2, criterion3, criterion4, criterion5,
                            criterion6, criterion7, criterion8, criterion9], 1):
        t0 = time.perf_counter()
        probs = fn()
        print(f"CRITERION {i} {'PASS' if not probs else 'FAIL'} ({time.perf_counter() - t0:.2f}s)")
