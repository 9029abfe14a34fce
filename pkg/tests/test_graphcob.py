from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_package, synthetic
from hfgraph import gf2, graphcob
from hfgraph.floer import model
from hfgraph.graphcob import (GraphEventTrace, PathTree, check_tree_independence,
                              compile, components, evaluate_trace, format_trace,
                              lasso, parse_trace, pi1_action, relative_h1_action,
                              tree_generators, vanish_if_isolated)
from hfgraph.moves import Move, eval_move, eval_program, start_state
from hfgraph.textio import ParseError

NULLHOMOTOPIC = "start p\nend p\nTRI p -> p q\nTRI p q -> p\n"
FREE_ARC = "start p\nend p\nVSTART q\nVEND q\n"
ISOLATED_LOOP = "start p\nend p\nVSTART q\nTRI q -> q r\nTRI q r -> q\nVEND q\n"
CAP_SWAP = "start p\nend p\nVSTART q\nSWAP p q\nVEND q\n"

PACKAGES = [synthetic(), model("S3"), model("S1xS2"), model("#2S1xS2"), model("L(3,1)")]


def ids(p):
    return p.name


def test_parse_and_format_roundtrip():
    text = ("manifold S1xS2\nstart p q\nend p r\nstar q\nVSTART r\nTRI p -> p s\n"
            "TRI p s -> p\nLOOP p BY zeta\nPUSH q BY zeta\nSWAP p q VIA zeta\n"
            "D1CAP p\nHANDLE 1 LOOP eta\nHANDLE 1 PLAIN\nHANDLE 3 FACTOR 2\n"
            "HANDLE 2 FACTOR 1 VIA zeta\nPATH anything at all\nVEND q\n")
    t = parse_trace(text)
    assert t.manifold == "S1xS2" and t.star == "q"
    again = parse_trace(format_trace(t))
    assert again.events == t.events and again.start == t.start and again.end == t.end


@pytest.mark.parametrize("text,lineno", [
    ("start p\nend p\nTRI p -> q r\n", 3),
    ("start p\nend p\nHANDLE 4 FACTOR 0\n", 3),
    ("start p\nend p\nWOBBLE p\n", 3),
    ("start p\nVEND p\n", 0),
])
def test_parse_errors(text, lineno):
    with pytest.raises(ParseError) as e:
        parse_trace(text)
    assert e.value.lineno == lineno


@pytest.mark.parametrize("text", [
    "start p\nend p\nVEND q\n",            # dangling strand
    "start p\nend p q\n",                  # end mismatch
    "start p\nend p\nVSTART p\n",          # strand already live
    "start p p\nend p\n",                  # repeated point
])
def test_ill_formed_traces(text):
    with pytest.raises(ValueError):
        components(parse_trace(text))


def test_component_flags():
    assert not vanish_if_isolated(parse_trace(NULLHOMOTOPIC))
    assert vanish_if_isolated(parse_trace(FREE_ARC))
    assert vanish_if_isolated(parse_trace(ISOLATED_LOOP))
    assert not vanish_if_isolated(parse_trace(CAP_SWAP))
    comps = components(parse_trace(ISOLATED_LOOP))
    assert sorted((c["start"], c["end"]) for c in comps) == [(False, False), (True, True)]


def test_compile_refuses_isolated_components():
    with pytest.raises(ValueError, match="isolated"):
        compile(parse_trace(FREE_ARC), "S1xS2")
    prog = compile(parse_trace(FREE_ARC), "S1xS2", allow_isolated=True)
    assert [m.kind for m in prog.moves] == ["CREATE", "TERM"]


@pytest.mark.parametrize("P", PACKAGES, ids=ids)
@pytest.mark.parametrize("text", [NULLHOMOTOPIC, FREE_ARC, ISOLATED_LOOP])
def test_vanishing_traces(P, text):
    t = parse_trace(text)
    assert evaluate_trace(t, P).is_zero()
    # the compiled program vanishes on its own, without the short-circuit
    assert eval_program(compile(t, P, allow_isolated=True)).is_zero()


@pytest.mark.parametrize("P", PACKAGES, ids=ids)
def test_cap_swap_is_d1_star(P):
    assert evaluate_trace(parse_trace(CAP_SWAP), P) == P.C
    assert evaluate_trace(parse_trace("start p\nend p\nD1CAP p\n"), P) == P.C


def test_empty_trace_is_identity():
    t = parse_trace("start p q\nend p q\n")
    f = evaluate_trace(t, "#2S1xS2")
    assert f == gf2.identity(f.domain)


@pytest.mark.parametrize("P", PACKAGES, ids=ids)
def test_terminate_then_split_plus_merge_then_create(P):
    f1 = evaluate_trace(parse_trace("start p q\nend p q\nVEND q\nTRI p -> p q\n"), P)
    f2 = evaluate_trace(parse_trace("start p q\nend p q\nTRI p q -> p\nVSTART q\n"), P)
    assert f1 + f2 == gf2.identity(f1.domain)


@pytest.mark.parametrize("P", PACKAGES, ids=ids)
def test_lasso_relations(P):
    for g in P.classes:
        G = P.action(g)
        one = gf2.identity(P.hf)

        def run(events):
            return evaluate_trace(parse_trace("start p\nend p\n" + events), P)

        assert run(f"VSTART q\nPUSH q BY {g}\nTRI p q -> p\n") == one
        assert run(f"TRI p -> p q\nPUSH q BY {g}\nVEND q\n") == one
        assert run(f"TRI p -> p q\nPUSH q BY {g}\nTRI p q -> p\n") == G
        assert run(f"VSTART q\nPUSH q BY {g}\nVEND q\n").is_zero()


@pytest.mark.parametrize("P", PACKAGES, ids=ids)
def test_pi1_action(P):
    s = start_state(P, ["p"])
    one = gf2.identity(P.hf)
    for g in P.classes:
        A = pi1_action(P, g)
        assert A == eval_move(s, Move("PUSH", ("p",), g))[0]
        assert A @ A == one


@pytest.mark.parametrize("star", ["p", "q", "r"])
def test_lasso_on_every_strand(star):
    P = synthetic()
    s = start_state(P, ["p", "q", "r"], star)
    for g in P.classes:
        ref = eval_move(s, Move("LOOP", ("p",), g))[0]
        for p in s.points:
            assert lasso(s, p, g) == ref


def test_path_tree_validation():
    with pytest.raises(ValueError):
        PathTree("p", (("a", "p", ()),))
    with pytest.raises(ValueError):
        PathTree("p", (("a", "q", ()), ("a", "r", ())))
    with pytest.raises(ValueError):
        PathTree("p", (("a", "q", ()), ("b", "q", ())))


def trees(classes):
    g = classes[0]
    h = classes[-1]
    return [
        PathTree("p", (("u1", "q", ()), ("u2", "r", ()))),
        PathTree("p", (("u1", "q", ((g, 1),)), ("u2", "r", ((h, 3),)))),
        PathTree("q", (("v1", "p", ()), ("v2", "r", ((g, -1),)))),
        PathTree("r", (("w1", "p", ((g, 1), (h, 1))), ("w2", "q", ((g, 2),)))),
    ]


def test_single_arc_map_matches_block_form():
    P = synthetic()
    T = PathTree("p", (("l", "q", ()),))
    f = relative_h1_action(P, T, ["l"], star="p")
    z = gf2.zero(P.hf)
    assert f == gf2.block_assemble([[z, z], [gf2.identity(P.hf), z]])


@pytest.mark.parametrize("star", ["p", "q", "r"])
def test_tree_independence_synthetic(star):
    P = synthetic()
    ts = trees(P.classes)
    for T in ts[1:]:
        rep = check_tree_independence(P, ts[0], T, star)
        assert rep.ok, rep.lines


def test_tree_check_detects_a_wrong_arc_map(monkeypatch):
    """Dropping the loop decoration from the arc maps must be caught."""
    P = synthetic()
    ts = trees(P.classes)

    def undecorated(s, T, label):
        p, _ = T.arc(label)
        f1, s1 = eval_move(s, Move("MERGE", (T.root, p)))
        f2, s2 = eval_move(s1, Move("SPLIT", (T.root, p)))
        if s2.star != s.star:
            g, s2 = graphcob.transition(s2, s.star)
            f2 = g @ f2
        return f2 @ f1

    monkeypatch.setattr(graphcob, "_arc_map", undecorated)
    rep = check_tree_independence(P, ts[0], ts[1])
    assert not rep.ok and rep.first_mismatch is not None


def test_unrelated_trees_rejected():
    P = synthetic()
    with pytest.raises(ValueError, match="unrelated"):
        check_tree_independence(P, PathTree("p", (("a", "q", ()),)),
                                PathTree("p", (("a", "r", ()),)))


def test_relative_class_boundary_must_balance():
    T = PathTree("p", (("a", "q", ()),))
    with pytest.raises(ValueError):
        graphcob._decompose(T, ({}, {"q": 1}))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from(["p", "q", "r"]))
def test_relative_action_properties_random(seed, star):
    rng = random.Random(seed)
    P = random_package(rng, 2, 2)
    ts = trees(P.classes)
    for T in ts[1:]:
        assert check_tree_independence(P, ts[0], T, star).ok
    gens = [n for n, _ in tree_generators(P, ts[0])]
    acts = [relative_h1_action(P, ts[0], [n], star) for n in gens]
    for a in acts:
        assert (a @ a).is_zero()
        for b in acts:
            assert a @ b == b @ a
    # linearity: the action of a sum is the sum of the actions
    both = relative_h1_action(P, ts[0], [gens[0], gens[-1]], star)
    assert both == acts[0] + acts[-1]


def test_handle_events_compile():
    t = parse_trace("start p\nend p\nHANDLE 1 LOOP eta\nHANDLE 3 FACTOR 1\n")
    f = evaluate_trace(t, "S1xS2")
    assert f == gf2.identity(f.domain)
    t = GraphEventTrace(("p",), ("p",), (graphcob.Event("PATH", ("x",)),))
    assert evaluate_trace(t, "S3") == gf2.identity(gf2.make_space(["1"]))


def test_vanishing_trace_needs_no_d1_star():
    from hfgraph import floer
    from hfgraph.textio import load_diagram
    P = floer.package(load_diagram(floer.FIXTURE_DIR / "s1xs2_sum2.hd"), 1, "sum2")
    t = parse_trace("start p\nend p\nVSTART q\nTRI q -> q r\nTRI q r -> q\nVEND q\n")
    f = evaluate_trace(t, P)
    assert f.is_zero() and f.domain.dim == P.rank
