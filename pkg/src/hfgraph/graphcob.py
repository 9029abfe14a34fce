"""Graph cobordisms given as height-ordered event traces.

Traces compile to move programs. Derived actions (the basepoint-loop
action and the relative H1 action attached to a tree of paths) are built
from the same move evaluator.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import gf2
from .floer import FloerPackage
from .gf2 import Gf2Map, strip_comment
from .moves import (EndState, Move, MoveProgram, eval_move, eval_program,
                    start_state, transition)
from .textio import ParseError

__all__ = [
    "Event", "GraphEventTrace", "PathTree", "TreeReport", "parse_trace",
    "format_trace", "components", "vanish_if_isolated", "compile",
    "evaluate_trace", "pi1_action", "lasso", "relative_h1_action",
    "check_tree_independence", "tree_generators",
]

EVENT_KINDS = {"VSTART", "VEND", "SPLIT", "MERGE", "LOOP", "PUSH", "D1CAP",
               "HANDLE", "SWAP", "PATH"}


@dataclass(frozen=True)
class Event:
    kind: str
    args: tuple[str, ...] = ()
    via: str | None = None

    def __post_init__(self):
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"unknown event {self.kind!r}")


@dataclass(frozen=True)
class GraphEventTrace:
    start: tuple[str, ...]
    end: tuple[str, ...]
    events: tuple[Event, ...] = ()
    manifold: str | None = None
    star: str | None = None


def _simulate(t: GraphEventTrace):
    """Walk the trace; returns (strand instances, unions, start ids, end ids)."""
    live: dict[str, int] = {}
    parent: list[int] = []

    def new():
        parent.append(len(parent))
        return len(parent) - 1

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        parent[find(a)] = find(b)

    if len(set(t.start)) != len(t.start) or len(set(t.end)) != len(t.end):
        raise ValueError("repeated point name in start or end")
    for p in t.start:
        live[p] = new()
    start_ids = set(live.values())

    def need(p):
        if p not in live:
            raise ValueError(f"dangling strand name {p!r}")
        return live[p]

    def fresh(p):
        if p in live:
            raise ValueError(f"strand {p!r} is already live")

    for i, ev in enumerate(t.events):
        a = ev.args
        if ev.kind == "VSTART":
            fresh(a[0])
            live[a[0]] = new()
        elif ev.kind == "VEND":
            need(a[0])
            del live[a[0]]
        elif ev.kind == "SPLIT":
            p, q = a
            need(p)
            fresh(q)
            live[q] = new()
            union(live[q], live[p])
        elif ev.kind == "MERGE":
            p, q = a
            union(need(p), need(q))
            del live[q]
        elif ev.kind in ("LOOP", "PUSH", "D1CAP"):
            need(a[0])
        elif ev.kind == "SWAP":
            need(a[0])
            need(a[1])
            live[a[0]], live[a[1]] = live[a[1]], live[a[0]]
        elif ev.kind in ("HANDLE", "PATH"):
            pass
    if set(live) != set(t.end):
        raise ValueError(f"live strands at the top {sorted(live)} do not match end {sorted(t.end)}")
    end_ids = set(live.values())
    comps: dict[int, set[int]] = {}
    for i in range(len(parent)):
        comps.setdefault(find(i), set()).add(i)
    return list(comps.values()), start_ids, end_ids


def components(t: GraphEventTrace) -> list[dict]:
    """Connected components with flags for touching the two ends."""
    comps, s_ids, e_ids = _simulate(t)
    return [{"size": len(c), "start": bool(c & s_ids), "end": bool(c & e_ids)} for c in comps]


def vanish_if_isolated(t: GraphEventTrace) -> bool:
    comps = components(t)
    if not (t.start or t.end):
        return False
    isolated = [c for c in comps if not c["start"] and not c["end"]]
    return bool(isolated) and len(comps) > 1


def _event_to_moves(ev: Event, s: EndState) -> list[Move]:
    a = ev.args
    if ev.kind == "VSTART":
        return [Move("CREATE", (a[0], s.star))]
    if ev.kind == "VEND":
        return [Move("TERM", (a[0],))]
    if ev.kind == "SPLIT":
        return [Move("SPLIT", a)]
    if ev.kind == "MERGE":
        return [Move("MERGE", a)]
    if ev.kind == "LOOP":
        return [Move("LOOP", a, ev.via)]
    if ev.kind == "PUSH":
        return [Move("PUSH", a, ev.via)]
    if ev.kind == "D1CAP":
        return [Move("D1", a)]
    if ev.kind == "SWAP":
        return [Move("SWAP", a, ev.via)]
    if ev.kind == "HANDLE":
        n = a[0]
        if n == "1":
            return [Move("H1", (a[1],), ev.via)]
        if n == "3":
            return [Move("H3", (a[1],))]
        if n == "2":
            return [Move("H2CANCEL", (a[1],), ev.via)]
        raise ValueError(f"unsupported handle index {n!r}")
    if ev.kind == "PATH":
        return []
    raise ValueError(f"unsupported event {ev.kind!r}")


def compile(t: GraphEventTrace, manifold=None, allow_isolated: bool = False) -> MoveProgram:
    """Translate a trace event by event into a move program."""
    if not allow_isolated and vanish_if_isolated(t):
        raise ValueError("trace has an isolated component; its map is zero")
    _simulate(t)
    if not t.start:
        raise ValueError("empty start ends are not supported")
    man = manifold if manifold is not None else (t.manifold or "S3")
    s = start_state(man, t.start, t.star)
    start = s
    moves = []
    for ev in t.events:
        for m in _event_to_moves(ev, s):
            _, s = eval_move(s, m)
            moves.append(m)
    if tuple(sorted(t.end)) != s.points:
        raise ValueError("compiled end state does not match the declared end")
    return MoveProgram(start, tuple(moves))


def evaluate_trace(t: GraphEventTrace, manifold=None) -> Gf2Map:
    """Evaluate a trace; isolated components short-circuit to zero."""
    if vanish_if_isolated(t) and not any(e.kind == "HANDLE" for e in t.events):
        # the zero map only needs the two end spaces
        _simulate(t)
        if not t.start:
            raise ValueError("empty start ends are not supported")
        man = manifold if manifold is not None else (t.manifold or "S3")
        a = start_state(man, t.start, t.star)
        b = start_state(man, t.end, t.star if t.star in t.end else None)
        return gf2.zero(a.space, b.space)
    prog = compile(t, manifold, allow_isolated=True)
    if vanish_if_isolated(t):
        return gf2.zero(prog.start.space, prog.end.space)
    return eval_program(prog)


# -- text format ------------------------------------------------------------------

def parse_event(line: str) -> Event:
    t = line.split()
    k = t[0].upper()
    if k == "VSTART" and len(t) == 2:
        return Event("VSTART", (t[1],))
    if k == "VEND" and len(t) == 2:
        return Event("VEND", (t[1],))
    if k == "TRI" and "->" in t:
        i = t.index("->")
        lhs, rhs = t[1:i], t[i + 1:]
        if len(lhs) == 1 and len(rhs) == 2 and rhs[0] == lhs[0]:
            return Event("SPLIT", (lhs[0], rhs[1]))
        if len(lhs) == 2 and len(rhs) == 1 and rhs[0] in lhs:
            keep = rhs[0]
            gone = lhs[1] if lhs[0] == keep else lhs[0]
            return Event("MERGE", (keep, gone))
    if k in ("LOOP", "PUSH") and len(t) == 4 and t[2].upper() == "BY":
        return Event(k, (t[1],), t[3])
    if k == "D1CAP" and len(t) == 2:
        return Event("D1CAP", (t[1],))
    if k == "SWAP" and len(t) in (3, 5):
        via = None
        if len(t) == 5 and t[3].upper() == "VIA":
            via = None if t[4].upper() == "ID" else t[4]
        elif len(t) == 5:
            raise ValueError(f"cannot parse event {line!r}")
        return Event("SWAP", (t[1], t[2]), via)
    if k == "HANDLE" and len(t) >= 3:
        n, what = t[1], t[2].upper()
        if n == "1" and what == "LOOP" and len(t) == 4:
            return Event("HANDLE", ("1", "LOOP"), t[3])
        if n == "1" and what == "PLAIN" and len(t) == 3:
            return Event("HANDLE", ("1", "PLAIN"))
        if n in ("2", "3") and what == "FACTOR" and len(t) >= 4:
            if len(t) == 4:
                return Event("HANDLE", (n, t[3]))
            if n == "2" and len(t) == 6 and t[4].upper() == "VIA":
                return Event("HANDLE", (n, t[3]), t[5])
    if k == "PATH":
        return Event("PATH", tuple(t[1:]))
    raise ValueError(f"cannot parse event {line!r}")


def parse_trace(text: str) -> GraphEventTrace:
    start = end = None
    man = star = None
    events = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = strip_comment(raw)
        if not line:
            continue
        key = line.split()[0]
        try:
            if key == "start":
                start = tuple(line.split()[1:])
            elif key == "end":
                end = tuple(line.split()[1:])
            elif key == "manifold":
                man = line.split(None, 1)[1].strip()
            elif key == "star":
                star = line.split()[1]
            else:
                events.append(parse_event(line))
        except (ValueError, IndexError) as exc:
            raise ParseError(lineno, str(exc)) from None
    if start is None or end is None:
        raise ParseError(0, "trace needs 'start' and 'end' lines")
    return GraphEventTrace(start, end, tuple(events), man, star)


def format_trace(t: GraphEventTrace) -> str:
    lines = ["start " + " ".join(t.start), "end " + " ".join(t.end)]
    for ev in t.events:
        a = ev.args
        if ev.kind == "SPLIT":
            lines.append(f"TRI {a[0]} -> {a[0]} {a[1]}")
        elif ev.kind == "MERGE":
            lines.append(f"TRI {a[0]} {a[1]} -> {a[0]}")
        elif ev.kind in ("LOOP", "PUSH"):
            lines.append(f"{ev.kind} {a[0]} BY {ev.via}")
        elif ev.kind == "SWAP":
            lines.append(f"SWAP {a[0]} {a[1]} VIA {ev.via or 'ID'}")
        elif ev.kind == "HANDLE":
            tail = f" {ev.via}" if a[:2] == ("1", "LOOP") else ""
            if a[0] in ("2", "3"):
                tail = f" VIA {ev.via}" if ev.via else ""
                lines.append(f"HANDLE {a[0]} FACTOR {a[1]}{tail}")
            else:
                lines.append(f"HANDLE 1 {a[1]}{tail}")
        else:
            lines.append(" ".join((ev.kind,) + a))
    return "\n".join(lines) + "\n"


# -- derived actions ----------------------------------------------------------------

def pi1_action(pkg: FloerPackage, gamma: str) -> Gf2Map:
    """Action of a basepoint loop: 1 + (d1)* [γ]."""
    G = pkg.action(gamma)
    return gf2.identity(pkg.hf) + pkg.C @ G


def lasso(s: EndState, p: str, gamma: str) -> Gf2Map:
    """Loop spliced into strand p, built as split, push, merge."""
    q = "_l"
    while q in s.points:
        q += "_"
    f1, s1 = eval_move(s, Move("SPLIT", (p, q)))
    f2, s2 = eval_move(s1, Move("PUSH", (q,), gamma))
    f3, s3 = eval_move(s2, Move("MERGE", (p, q)))
    if not s3.same_as(s):
        raise ValueError("lasso did not return to the starting state")
    return f3 @ f2 @ f1


@dataclass(frozen=True)
class PathTree:
    """A root basepoint and one labelled arc to every other basepoint.

    Each arc carries a formal sum of loop classes (integer coefficients)
    describing how it differs from the reference arc.
    """

    root: str
    arcs: tuple[tuple[str, str, tuple[tuple[str, int], ...]], ...]  # (label, point, decoration)

    def __post_init__(self):
        pts = [p for _, p, _ in self.arcs]
        labels = [l for l, _, _ in self.arcs]
        if self.root in pts or len(set(pts)) != len(pts):
            raise ValueError("arcs must reach each non-root basepoint exactly once")
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate arc label")

    @property
    def points(self) -> tuple[str, ...]:
        return tuple(sorted([self.root] + [p for _, p, _ in self.arcs]))

    def arc(self, label: str):
        for l, p, dec in self.arcs:
            if l == label:
                return p, dict(dec)
        raise ValueError(f"arc label {label!r} not in tree")

    def arc_to(self, point: str):
        for l, p, dec in self.arcs:
            if p == point:
                return l, dict(dec)
        raise ValueError(f"no arc to {point!r}")


Relative = tuple[dict, dict]  # (loop coefficients, boundary coefficients)


def _canonical(T: PathTree, eta: Sequence) -> Relative:
    """Formal sum (tokens, or (token, coeff) pairs) to (loops, boundary)."""
    loops: dict[str, int] = {}
    bd: dict[str, int] = {}
    arc_labels = {l for l, _, _ in T.arcs}
    for item in eta:
        tok, c = (item, 1) if isinstance(item, str) else item
        if tok in arc_labels:
            p, dec = T.arc(tok)
            for g, k in dec.items():
                loops[g] = loops.get(g, 0) + c * k
            bd[p] = bd.get(p, 0) + c
            bd[T.root] = bd.get(T.root, 0) - c
        else:
            loops[tok] = loops.get(tok, 0) + c
    return loops, bd


def _decompose(T: PathTree, rel: Relative) -> tuple[dict, dict]:
    """Write a relative class as loops plus T-arcs (coefficients mod 2)."""
    loops, bd = dict(rel[0]), rel[1]
    if sum(bd.values()) != 0:
        raise ValueError("boundary of a relative class must have total zero")
    arcs = {}
    for p, c in bd.items():
        if p == T.root or c == 0:
            continue
        if p not in T.points:
            raise ValueError(f"basepoint {p!r} not in tree")
        label, dec = T.arc_to(p)
        arcs[label] = c
        for g, k in dec.items():
            loops[g] = loops.get(g, 0) - c * k
    return ({g: k % 2 for g, k in loops.items() if k % 2},
            {l: c % 2 for l, c in arcs.items() if c % 2})


def _arc_map(s: EndState, T: PathTree, label: str) -> Gf2Map:
    """Merge the arc endpoint into the root and split it off again."""
    p, dec = T.arc(label)
    push = gf2.identity(s.space)
    for g, k in sorted(dec.items()):
        if k % 2:
            f, _ = eval_move(s, Move("PUSH", (p,), g))
            push = f @ push
    f1, s1 = eval_move(s, Move("MERGE", (T.root, p)))
    f2, s2 = eval_move(s1, Move("SPLIT", (T.root, p)))
    if s2.star != s.star:
        g, s2 = transition(s2, s.star)
        f2 = g @ f2
    if not s2.same_as(s):
        raise ValueError("arc map did not return to the starting state")
    return push @ f2 @ f1 @ push


def _tree_state(pkg, T: PathTree, star: str | None) -> EndState:
    return start_state(pkg, T.points, star if star is not None else T.root)


def relative_h1_action(pkg, T: PathTree, eta: Sequence, star: str | None = None) -> Gf2Map:
    s = _tree_state(pkg, T, star)
    return _relative(s, T, _canonical(T, eta))


def _relative(s: EndState, T: PathTree, rel: Relative) -> Gf2Map:
    loops, arcs = _decompose(T, rel)
    out = gf2.zero(s.space)
    for g in sorted(loops):
        f, _ = eval_move(s, Move("LOOP", (T.root,), g))
        out = out + f
    for label in sorted(arcs):
        out = out + _arc_map(s, T, label)
    return out


def tree_generators(pkg, T: PathTree) -> list[tuple[str, Relative]]:
    """Generators of H1(Y, points) up to torsion: loop classes and T-arcs."""
    s = _tree_state(pkg, T, None)
    man = s.manifold
    out = [(g, ({g: 1}, {})) for g in man.classes if not man.is_torsion(g)]
    for label, _p, _dec in T.arcs:
        out.append((label, _canonical(T, [label])))
    return out


@dataclass(frozen=True)
class TreeReport:
    ok: bool
    lines: tuple[str, ...]
    first_mismatch: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def check_tree_independence(pkg, T: PathTree, T2: PathTree, star: str | None = None) -> TreeReport:
    if T.points != T2.points:
        raise ValueError("unrelated trees: basepoint sets differ")
    s = _tree_state(pkg, T, star)
    lines = []
    first = None
    for name, rel in tree_generators(pkg, T):
        a = _relative(s, T, rel)
        b = _relative(s, T2, rel)
        ok = a == b
        lines.append(f"{name}: {'PASS' if ok else 'FAIL'}")
        if not ok and first is None:
            first = name
    return TreeReport(first is None, tuple(lines), first)
