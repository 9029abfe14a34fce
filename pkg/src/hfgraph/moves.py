"""Elementary graph-cobordism moves and their evaluation over GF(2).

A state is ``ĤF(Y, star) ⊗ V^{⊗(k-1)}``: the starred basepoint carries
the base diagram and each other basepoint contributes one V factor, in
sorted name order. All matrices are written in these coordinates.
Moves that the model formulas describe relative to a particular starred
point are conjugated by the star transition when the state is starred
elsewhere.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable, Iterable, Sequence

from . import gf2
from .floer import FloerPackage, model, tensor_packages
from .gf2 import Gf2Map, LabeledSpace, TENSOR, strip_comment, THETA_MINUS as TM, THETA_PLUS as TP

__all__ = [
    "Move", "EndState", "MoveProgram", "start_state", "eval_move", "eval_program",
    "concat", "spinc_blocks", "is_product", "parse_program", "format_program",
    "random_program", "transition",
]

KINDS = {
    "CREATE", "TERM", "SPLIT", "MERGE", "LOOP", "PUSH", "D1", "SWAP", "STAR",
    "H1", "H3", "H2CANCEL",
}
PRODUCT_KINDS = KINDS - {"H1", "H3", "H2CANCEL"}


@dataclass(frozen=True)
class Move:
    kind: str
    args: tuple[str, ...] = ()
    via: str | None = None  # class name for LOOP/PUSH/SWAP/H1/H2CANCEL

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown move {self.kind!r}")

    def __str__(self) -> str:
        return format_move(self)


def _manifold(summands: Sequence[FloerPackage]) -> FloerPackage:
    if not summands:
        return model("S3")
    out = summands[0]
    for s in summands[1:]:
        out = tensor_packages(out, s)
    return out


@dataclass(frozen=True)
class EndState:
    summands: tuple[FloerPackage, ...]
    points: tuple[str, ...]  # all basepoints, sorted
    star: str

    def __post_init__(self):
        pts = tuple(sorted(self.points))
        if len(set(pts)) != len(pts) or not pts:
            raise ValueError("basepoints must be distinct and nonempty")
        for p in pts:
            if not p or any(ch in p for ch in " ⊗+,"):
                raise ValueError(f"bad basepoint name {p!r}")
        if self.star not in pts:
            raise ValueError(f"starred point {self.star!r} is not a basepoint")
        object.__setattr__(self, "points", pts)
        names = [n for s in self.summands for n in s.classes]
        if len(set(names)) != len(names):
            raise ValueError("H1 class names collide between summands")

    @property
    def factors(self) -> tuple[str, ...]:
        return tuple(p for p in self.points if p != self.star)

    @cached_property
    def manifold(self) -> FloerPackage:
        return _manifold(self.summands)

    @property
    def manifold_name(self) -> str:
        return "#".join(s.name for s in self.summands) or "S3"

    @cached_property
    def base(self) -> LabeledSpace:
        return self.manifold.hf

    @property
    def decoration(self) -> gf2.TensorDecoration:
        return gf2.TensorDecoration(self.base, len(self.factors), None)

    @cached_property
    def space(self) -> LabeledSpace:
        return self.decoration.space

    def same_as(self, other: "EndState") -> bool:
        return (self.points == other.points and self.star == other.star
                and self.base == other.base
                and [s.name for s in self.summands] == [s.name for s in other.summands]
                and self.manifold.classes == other.manifold.classes)

    def describe(self) -> str:
        return f"{self.manifold_name} points={','.join(self.points)} star={self.star}"


def start_state(manifold: str | FloerPackage | Sequence[FloerPackage],
                points: Sequence[str], star: str | None = None) -> EndState:
    if isinstance(manifold, str):
        m = model(manifold)
        summands = tuple(_split_model(manifold))
    elif isinstance(manifold, FloerPackage):
        summands = (manifold,)
    else:
        summands = tuple(manifold)
    pts = tuple(sorted(points))
    return EndState(summands, pts, star if star is not None else pts[0])


def _split_model(name: str) -> list[FloerPackage]:
    from .floer import parse_manifold
    parts = parse_manifold(name)
    if not parts:
        return []
    full = model(name)
    # rebuild summands with the class names the full model uses
    out = []
    used = 0
    names = full.classes
    for part in parts:
        pk = model(part)
        k = len(pk.classes)
        mapping = dict(zip(pk.classes, names[used:used + k]))
        used += k
        out.append(replace(pk, h1=tuple((mapping[n], f) for n, f in pk.h1),
                           torsion=tuple((mapping[n], t) for n, t in pk.torsion)))
    return out


# -- basis bookkeeping ----------------------------------------------------------

Basis = tuple[str, tuple[str, ...]]  # (base label, thetas in factor order)


def _label(base: str, thetas: Sequence[str]) -> str:
    return TENSOR.join((base,) + tuple(thetas))


def _basis(s: EndState) -> list[Basis]:
    out = [(b, ()) for b in s.base.labels]
    for _ in s.factors:
        out = [(b, th + (t,)) for b, th in out for t in (TP, TM)]
    return out


def _linmap(src: EndState, dst: EndState,
            fn: Callable[[str, dict], Iterable[tuple[str, dict]]]) -> Gf2Map:
    """Assemble a map from a function on basis elements.

    ``fn`` gets (base label, {point: theta}) and yields images in the same
    form for the destination state.
    """
    dom, cod = src.space, dst.space
    cols = []
    for b, th in _basis(src):
        acc: set = set()
        for b2, th2 in fn(b, dict(zip(src.factors, th))):
            lab = _label(b2, tuple(th2[p] for p in dst.factors))
            acc ^= {lab}
        cols.append(frozenset(acc))
    return Gf2Map(dom, cod, tuple(cols))


def _op_images(f: Gf2Map, b: str) -> list[str]:
    return sorted(f.column(b))


def _with(th: dict, **kw) -> dict:
    out = dict(th)
    out.update(kw)
    return out


# -- star transition -------------------------------------------------------------

def transition(s: EndState, k: str) -> tuple[Gf2Map, EndState]:
    """Change of star from s.star to k: 1 + N_k (C + sum of N_j^dagger)."""
    r = s.star
    if k not in s.points:
        raise ValueError(f"unknown basepoint {k!r}")
    if k == r:
        return gf2.identity(s.space), s
    dst = EndState(s.summands, s.points, k)
    C = s.manifold.C
    others = [j for j in s.factors if j != k]

    def fn(b, th):
        out = []

        def emit(b2, th2):
            th2 = dict(th2)
            th2[r] = th2.pop(k)
            out.append((b2, th2))

        emit(b, th)
        if th[k] == TP:
            for c in _op_images(C, b):
                emit(c, _with(th, **{k: TM}))
            for j in others:
                if th[j] == TM:
                    emit(b, _with(th, **{k: TM, j: TP}))
        return out

    return _linmap(s, dst, fn), dst


def _conjugate(s: EndState, pivot: str, inner: Callable[[EndState], tuple[Gf2Map, EndState]],
               back_to: str | None = None) -> tuple[Gf2Map, EndState]:
    """Evaluate ``inner`` with the star moved to ``pivot``, then move it back."""
    t1, s1 = transition(s, pivot)
    f, s2 = inner(s1)
    target = s.star if back_to is None else back_to
    t2, s3 = transition(s2, target)
    return t2 @ f @ t1, s3


# -- moves ------------------------------------------------------------------------

def _need(s: EndState, *names: str):
    for n in names:
        if n not in s.points:
            raise ValueError(f"unknown basepoint {n!r}")


def _fresh(s: EndState, n: str):
    if n in s.points:
        raise ValueError(f"basepoint {n!r} already exists")
    if not n or any(ch in n for ch in " ⊗+,"):
        raise ValueError(f"bad basepoint name {n!r}")


def _create(s: EndState, q: str, near: str):
    _need(s, near)
    _fresh(s, q)
    dst = EndState(s.summands, s.points + (q,), s.star)
    return _linmap(s, dst, lambda b, th: [(b, _with(th, **{q: TP}))]), dst


def _term(s: EndState, q: str):
    _need(s, q)
    if len(s.points) == 1:
        raise ValueError("cannot terminate the only basepoint")
    if q == s.star:
        other = next(p for p in s.points if p != q)
        t, s1 = transition(s, other)
        f, s2 = _term(s1, q)
        return f @ t, s2
    dst = EndState(s.summands, tuple(p for p in s.points if p != q), s.star)

    def fn(b, th):
        if th[q] == TM:
            rest = dict(th)
            del rest[q]
            return [(b, rest)]
        return []

    return _linmap(s, dst, fn), dst


def _split(s: EndState, p: str, q: str):
    _need(s, p)
    _fresh(s, q)
    if s.star != p:
        return _conjugate(s, p, lambda s1: _split(s1, p, q))
    dst = EndState(s.summands, s.points + (q,), s.star)
    return _linmap(s, dst, lambda b, th: [(b, _with(th, **{q: TM}))]), dst


def _merge(s: EndState, p: str, q: str):
    """Merge strands p and q into one strand named p."""
    _need(s, p, q)
    if p == q:
        raise ValueError("cannot merge a strand with itself")
    if s.star not in (p, q):
        return _conjugate(s, p, lambda s1: _merge(s1, p, q))
    keep, gone = (p, q) if s.star == p else (q, p)
    pts = tuple(x for x in s.points if x != gone)
    mid = EndState(s.summands, pts, keep)

    def fn(b, th):
        if th[gone] == TP:
            rest = dict(th)
            del rest[gone]
            return [(b, rest)]
        return []

    f = _linmap(s, mid, fn)
    if keep == p:
        return f, mid
    # the surviving strand is called p
    dst = EndState(s.summands, tuple(sorted(x if x != q else p for x in pts)), p)
    return _rename(f, mid, dst, {q: p}), dst


def _rename(f: Gf2Map, src: EndState, dst: EndState, names: dict) -> Gf2Map:
    """Reinterpret the codomain of f (in state src) as state dst with points renamed."""
    def fn(b, th):
        return [(b, {names.get(k, k): v for k, v in th.items()})]
    g = _linmap(src, dst, fn)
    return g @ f


def _base_op(s: EndState, op: Gf2Map) -> Gf2Map:
    return _linmap(s, s, lambda b, th: [(c, th) for c in _op_images(op, b)])


def _class(s: EndState, gamma: str) -> Gf2Map:
    return s.manifold.action(gamma)


def _loop(s: EndState, p: str, gamma: str):
    _need(s, p)
    return _base_op(s, _class(s, gamma)), s


def _push(s: EndState, p: str, gamma: str):
    """Drag strand p once around the loop gamma."""
    _need(s, p)
    G = _class(s, gamma)
    if len(s.points) == 1:
        C = s.manifold.C
        return gf2.identity(s.space) + _base_op(s, C @ G), s
    if p == s.star:
        other = next(x for x in s.points if x != p)
        return _conjugate(s, other, lambda s1: _push(s1, p, gamma))

    def fn(b, th):
        out = [(b, th)]
        if th[p] == TM:
            out += [(c, _with(th, **{p: TP})) for c in _op_images(G, b)]
        return out

    return _linmap(s, s, fn), s


def _swap(s: EndState, p: str, q: str, via: str | None):
    _need(s, p, q)
    if p == q:
        raise ValueError("cannot swap a point with itself")
    r = s.star
    sigma = {p: q, q: p}
    r2 = sigma.get(r, r)
    mid = EndState(s.summands, s.points, r2)
    f = _linmap(s, mid, lambda b, th: [(b, {sigma.get(k, k): v for k, v in th.items()})])
    t, dst = transition(mid, r)
    out = t @ f
    if via is not None:
        f1, _ = _push(dst, q, via)
        f2, _ = _push(dst, p, via)
        out = f2 @ f1 @ out
    return out, dst


def _d1(s: EndState, p: str):
    _need(s, p)
    q = "_c"
    while q in s.points:
        q += "_"
    f1, s1 = _create(s, q, p)
    f2, s2 = _swap(s1, p, q, None)
    f3, s3 = _term(s2, q)
    return f3 @ f2 @ f1, s3


def _summand_index(s: EndState, i: str) -> int:
    try:
        k = int(i)
    except ValueError:
        raise ValueError(f"bad factor index {i!r}") from None
    if not 0 <= k < len(s.summands):
        raise ValueError(f"factor index {k} out of range (manifold has {len(s.summands)} summands)")
    sm = s.summands[k]
    if sm.hf.labels != (TP, TM) or sm.d1_star is None or not sm.d1_star.is_zero():
        raise ValueError(f"factor {k} is not an S1xS2 summand")
    return k


def _split_base(s: EndState, k: int) -> Callable[[str], tuple[str, str]]:
    """Split a base label into (label without summand k, theta of summand k)."""
    n = len(s.summands)

    def fn(b: str):
        parts = b.split(TENSOR)
        if len(parts) != n:
            raise ValueError("cannot locate summand in base label")
        theta = parts.pop(k)
        return (TENSOR.join(parts) if parts else "1"), theta

    return fn


def _handle1(s: EndState, how: str, gamma: str | None):
    if how not in ("LOOP", "PLAIN"):
        raise ValueError("H1 takes LOOP <class> or PLAIN")
    existing = set(s.manifold.classes)
    if how == "LOOP":
        if not gamma:
            raise ValueError("H1 LOOP needs a class name")
        name = gamma
    else:
        n = 1
        while f"core{n}" in existing:
            n += 1
        name = f"core{n}"
    if name in existing:
        raise ValueError(f"class name {name!r} already registered")
    v = model("S1xS2")
    v = replace(v, h1=tuple((name, f) for _, f in v.h1), torsion=((name, False),))
    dst = EndState(s.summands + (v,), s.points, s.star)
    theta = TM if how == "LOOP" else TP
    nsum = len(s.summands)

    def fn(b, th):
        nb = _label(b, (theta,)) if nsum else theta
        return [(nb, th)]

    return _linmap(s, dst, fn), dst


def _handle3(s: EndState, i: str):
    k = _summand_index(s, i)
    dst = EndState(s.summands[:k] + s.summands[k + 1:], s.points, s.star)
    split = _split_base(s, k)

    def fn(b, th):
        rest, theta = split(b)
        return [(rest, th)] if theta == TM else []

    return _linmap(s, dst, fn), dst


def _handle2(s: EndState, i: str, gamma: str | None):
    k = _summand_index(s, i)
    dst = EndState(s.summands[:k] + s.summands[k + 1:], s.points, s.star)
    G = _class(dst, gamma) if gamma else None
    split = _split_base(s, k)

    def fn(b, th):
        rest, theta = split(b)
        if theta == TP:
            return [(rest, th)]
        if G is None:
            return []
        return [(c, th) for c in _op_images(G, rest)]

    return _linmap(s, dst, fn), dst


def eval_move(s: EndState, m: Move) -> tuple[Gf2Map, EndState]:
    a = m.args
    k = m.kind

    def arity(n):
        if len(a) != n:
            raise ValueError(f"{k} expects {n} argument(s)")

    if k == "CREATE":
        arity(2)
        return _create(s, a[0], a[1])
    if k == "TERM":
        arity(1)
        return _term(s, a[0])
    if k == "SPLIT":
        arity(2)
        return _split(s, a[0], a[1])
    if k == "MERGE":
        arity(2)
        return _merge(s, a[0], a[1])
    if k == "LOOP":
        arity(1)
        return _loop(s, a[0], m.via)
    if k == "PUSH":
        arity(1)
        return _push(s, a[0], m.via)
    if k == "D1":
        arity(1)
        return _d1(s, a[0])
    if k == "SWAP":
        arity(2)
        return _swap(s, a[0], a[1], m.via)
    if k == "STAR":
        arity(1)
        return transition(s, a[0])
    if k == "H1":
        arity(1)
        return _handle1(s, a[0], m.via)
    if k == "H3":
        arity(1)
        return _handle3(s, a[0])
    if k == "H2CANCEL":
        arity(1)
        return _handle2(s, a[0], m.via)
    raise ValueError(f"unknown move {k!r}")


# -- programs ----------------------------------------------------------------------

@dataclass(frozen=True)
class MoveProgram:
    start: EndState
    moves: tuple[Move, ...] = ()

    @property
    def end(self) -> EndState:
        s = self.start
        for m in self.moves:
            _, s = eval_move(s, m)
        return s

    def __len__(self) -> int:
        return len(self.moves)


def eval_program(p: MoveProgram) -> Gf2Map:
    s = p.start
    total = gf2.identity(s.space)
    for m in p.moves:
        f, s = eval_move(s, m)
        total = f @ total
    return total


def concat(p1: MoveProgram, p2: MoveProgram) -> MoveProgram:
    if not p1.end.same_as(p2.start):
        raise ValueError(f"state mismatch: {p1.end.describe()} vs {p2.start.describe()}")
    return MoveProgram(p1.start, p1.moves + p2.moves)


def is_product(p: MoveProgram) -> bool:
    return all(m.kind in PRODUCT_KINDS for m in p.moves)


def spinc_blocks(p: MoveProgram) -> list[tuple[tuple[str, str], Gf2Map]]:
    """Blocks of the evaluated map between Spin^c classes (out, in)."""
    if not is_product(p):
        raise ValueError("spinc_blocks needs a product-type program (no handle moves)")
    f = eval_program(p)
    cls_in = _spinc_of_labels(p.start)
    cls_out = _spinc_of_labels(p.end)
    classes = sorted(set(cls_in.values()) | set(cls_out.values()))
    out = []
    for so in classes:
        for si in classes:
            dom = LabeledSpace(tuple(l for l in f.domain.labels if cls_in[l] == si))
            cod = LabeledSpace(tuple(l for l in f.codomain.labels if cls_out[l] == so))
            cols = tuple(frozenset(x for x in f.column(l) if cls_out[x] == so) for l in dom.labels)
            out.append(((so, si), Gf2Map(dom, cod, cols)))
    return out


def _spinc_of_labels(s: EndState) -> dict[str, str]:
    base_cls = dict(s.manifold.spinc_of)
    return {_label(b, th): base_cls[b] for b, th in _basis(s)}


def assemble_blocks(blocks, domain: LabeledSpace, codomain: LabeledSpace) -> Gf2Map:
    cols = {l: set() for l in domain.labels}
    for _, f in blocks:
        for l, c in zip(f.domain.labels, f.columns):
            cols[l] ^= set(c)
    return Gf2Map(domain, codomain, tuple(frozenset(cols[l]) for l in domain.labels))


# -- text format ---------------------------------------------------------------------

def format_move(m: Move) -> str:
    a = m.args
    k = m.kind
    if k == "CREATE":
        return f"CREATE {a[0]} NEAR {a[1]}"
    if k == "SPLIT":
        return f"SPLIT {a[0]} -> {a[0]} {a[1]}"
    if k == "MERGE":
        return f"MERGE {a[0]} {a[1]} -> {a[0]}"
    if k in ("LOOP", "PUSH"):
        return f"{k} {a[0]} BY {m.via}"
    if k == "SWAP":
        return f"SWAP {a[0]} {a[1]} VIA {m.via or 'ID'}"
    if k == "H1":
        return f"H1 LOOP {m.via}" if a[0] == "LOOP" else "H1 PLAIN"
    if k in ("H3", "H2CANCEL"):
        tail = f" VIA {m.via}" if m.via else ""
        return f"{k} FACTOR {a[0]}{tail}"
    return f"{k} {' '.join(a)}"


def parse_move(line: str) -> Move:
    t = line.split()
    if not t:
        raise ValueError("empty move")
    k = t[0].upper()
    try:
        if k == "CREATE" and len(t) == 4 and t[2].upper() == "NEAR":
            return Move("CREATE", (t[1], t[3]))
        if k == "TERM" and len(t) == 2:
            return Move("TERM", (t[1],))
        if k == "SPLIT" and len(t) == 5 and t[2] == "->" and t[3] == t[1]:
            return Move("SPLIT", (t[1], t[4]))
        if k == "MERGE" and len(t) == 5 and t[3] == "->" and t[4] in (t[1], t[2]):
            a, b = (t[1], t[2]) if t[4] == t[1] else (t[2], t[1])
            return Move("MERGE", (a, b))
        if k in ("LOOP", "PUSH") and len(t) == 4 and t[2].upper() == "BY":
            return Move(k, (t[1],), t[3])
        if k == "SWAP" and len(t) in (3, 5):
            via = None
            if len(t) == 5:
                if t[3].upper() != "VIA":
                    raise IndexError
                via = None if t[4].upper() == "ID" else t[4]
            return Move("SWAP", (t[1], t[2]), via)
        if k in ("D1", "STAR") and len(t) == 2:
            return Move(k, (t[1],))
        if k == "H1":
            if len(t) == 3 and t[1].upper() == "LOOP":
                return Move("H1", ("LOOP",), t[2])
            if len(t) == 2 and t[1].upper() == "PLAIN":
                return Move("H1", ("PLAIN",))
        if k in ("H3", "H2CANCEL") and len(t) >= 3 and t[1].upper() == "FACTOR":
            if len(t) == 3:
                return Move(k, (t[2],))
            if k == "H2CANCEL" and len(t) == 5 and t[3].upper() == "VIA":
                return Move(k, (t[2],), t[4])
    except IndexError:
        pass
    raise ValueError(f"cannot parse move {line!r}")


def parse_program(text: str, manifold: str | FloerPackage | Sequence[FloerPackage] | None = None) -> MoveProgram:
    """Parse a program: header lines ``manifold``, ``points``, ``star`` then moves."""
    from .textio import ParseError
    man = None
    pts = None
    star = None
    moves = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = strip_comment(raw)
        if not line:
            continue
        key = line.split()[0]
        try:
            if moves and key in ("manifold", "points", "star"):
                raise ValueError(f"header line {key!r} after the first move")
            if key == "manifold":
                man = line.split(None, 1)[1].strip()
            elif key == "points":
                pts = line.split()[1:]
            elif key == "star":
                star = line.split()[1]
            else:
                moves.append(parse_move(line))
        except (ValueError, IndexError) as exc:
            raise ParseError(lineno, str(exc)) from None
    if manifold is None:
        manifold = man or "S3"
    if not pts:
        raise ParseError(0, "missing 'points' header")
    start = start_state(manifold, pts, star)
    return MoveProgram(start, tuple(moves))


def format_program(p: MoveProgram) -> str:
    lines = [f"manifold {p.start.manifold_name}", "points " + " ".join(p.start.points),
             f"star {p.start.star}"]
    lines += [format_move(m) for m in p.moves]
    return "\n".join(lines) + "\n"


# -- random programs -------------------------------------------------------------------

def random_program(rng: random.Random, manifold: str | FloerPackage = "S1xS2",
                   length: int = 12, max_points: int = 4, max_summands: int = 3,
                   product_only: bool = False) -> MoveProgram:
    """A random well-typed program; every move is checked as it is drawn."""
    npts = rng.randint(1, 3)
    pts = [f"p{i}" for i in range(npts)]
    s = start_state(manifold, pts, rng.choice(pts))
    start = s
    moves = []
    counter = npts
    for _ in range(length):
        for _attempt in range(20):
            m = _random_move(rng, s, counter, max_points, max_summands, product_only)
            if m is None:
                continue
            try:
                _, s2 = eval_move(s, m)
            except ValueError:
                continue
            moves.append(m)
            s = s2
            if m.kind in ("CREATE", "SPLIT"):
                counter += 1
            break
    return MoveProgram(start, tuple(moves))


def _random_move(rng, s: EndState, counter: int, max_points: int, max_summands: int,
                 product_only: bool) -> Move | None:
    pts = list(s.points)
    classes = s.manifold.classes
    fresh = f"p{counter}"
    kinds = ["CREATE", "TERM", "SPLIT", "MERGE", "LOOP", "PUSH", "D1", "SWAP", "STAR"]
    if not product_only:
        kinds += ["H1", "H3", "H2CANCEL"]
    k = rng.choice(kinds)
    if k == "CREATE" and len(pts) < max_points:
        return Move(k, (fresh, rng.choice(pts)))
    if k == "SPLIT" and len(pts) < max_points:
        return Move(k, (rng.choice(pts), fresh))
    if k == "TERM" and len(pts) > 1:
        return Move(k, (rng.choice(pts),))
    if k in ("MERGE", "SWAP") and len(pts) > 1:
        a, b = rng.sample(pts, 2)
        via = rng.choice(classes) if k == "SWAP" and classes and rng.random() < 0.3 else None
        return Move(k, (a, b), via)
    if k in ("LOOP", "PUSH") and classes:
        return Move(k, (rng.choice(pts),), rng.choice(classes))
    if k in ("D1", "STAR"):
        return Move(k, (rng.choice(pts),))
    if k == "H1" and len(s.summands) < max_summands:
        if rng.random() < 0.5:
            return Move(k, ("PLAIN",))
        n = 1
        while f"g{n}" in classes:
            n += 1
        return Move(k, ("LOOP",), f"g{n}")
    if k in ("H3", "H2CANCEL"):
        idx = [i for i, sm in enumerate(s.summands) if sm.hf.labels == (TP, TM)]
        if idx:
            i = rng.choice(idx)
            via = None
            if k == "H2CANCEL":
                rest = [n for j, sm in enumerate(s.summands) if j != i for n in sm.classes]
                if rest and rng.random() < 0.5:
                    via = rng.choice(rest)
            return Move(k, (str(i),), via)
    return None
