"""Combinatorial multi-pointed Heegaard diagrams.

A diagram is a ribbon graph: the alpha and beta curves give cyclic orders
of intersection points, and the sign of each point fixes the cyclic order
of the four half-edges there. Faces are traced from that data. Regions are
either single traced boundary cycles (disks) or explicitly grouped cycles
(planar regions with several boundary components).

Corner ``P.k`` at point ``P`` is the quadrant between the k-th and
(k+1)-th half-edge in counterclockwise order. Even corners leave along
alpha (counterclockwise boundary direction), so they are the source
corners of a domain; odd corners are target corners.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from . import zlinalg

__all__ = [
    "Point", "HeegaardDiagram", "Generator", "Domain", "DomainLattice",
    "SpincPartition", "Structure", "ValidationReport", "validate", "generators",
    "domains", "maslov_index", "periodic_domains", "is_weakly_admissible",
    "admissibility_certificate", "h1_and_spinc", "stabilize03", "loop_pairing",
    "loop_is_torsion", "epsilon", "n_z", "point_multiplicity", "Stabilization",
]


@dataclass(frozen=True)
class Point:
    name: str
    alpha: str
    beta: str
    sign: int


@dataclass(frozen=True)
class HeegaardDiagram:
    genus: int
    alphas: tuple[tuple[str, tuple[str, ...]], ...]
    betas: tuple[tuple[str, tuple[str, ...]], ...]
    points: tuple[Point, ...]
    regions: tuple[tuple[str, tuple[str, ...]], ...] = ()
    basepoints: tuple[tuple[str, str], ...] = ()
    loops: tuple[tuple[str, tuple[str, ...]], ...] = ()

    @cached_property
    def point(self) -> dict[str, Point]:
        return {p.name: p for p in self.points}

    @property
    def alpha_names(self) -> list[str]:
        return [a for a, _ in self.alphas]

    @property
    def beta_names(self) -> list[str]:
        return [b for b, _ in self.betas]

    @cached_property
    def structure(self) -> "Structure":
        return Structure(self)

    @property
    def basepoint_names(self) -> list[str]:
        return [z for z, _ in self.basepoints]

    def loop(self, name: str) -> tuple[str, ...]:
        for n, word in self.loops:
            if n == name:
                return word
        raise ValueError(f"unknown loop {name!r}")


@dataclass(frozen=True)
class Edge:
    name: str
    kind: str  # "a", "b" or "s" (seam)
    curve: str
    tail: str
    head: str


@dataclass
class Region:
    name: str
    cycles: list[int]
    corners: list[tuple[str, int]] = field(default_factory=list)

    @property
    def chi(self) -> int:
        return 2 - len(self.cycles)

    @property
    def euler_measure(self) -> Fraction:
        return Fraction(self.chi) - Fraction(len(self.corners), 4)


def _corner_name(c: tuple[str, int]) -> str:
    return f"{c[0]}.{c[1]}"


def _parse_corner(s: str) -> tuple[str, int]:
    name, _, k = s.rpartition(".")
    if not name or k not in ("0", "1", "2", "3"):
        raise ValueError(f"bad corner reference {s!r}")
    return name, int(k)


class Structure:
    """Traced cell structure of a diagram (built on demand, read-only)."""

    def __init__(self, d: HeegaardDiagram):
        self.d = d
        self.error: str | None = None
        self._build()

    def _fail(self, msg: str):
        if self.error is None:
            self.error = msg

    def _build(self):
        d = self.d
        pts = d.point
        self.edges: list[Edge] = []
        self.edge_index: dict[str, int] = {}
        out_edge: dict[tuple[str, str], int] = {}
        in_edge: dict[tuple[str, str], int] = {}
        for kind, curves in (("a", d.alphas), ("b", d.betas)):
            for cname, order in curves:
                for i, v in enumerate(order):
                    w = order[(i + 1) % len(order)]
                    e = Edge(f"{cname}.{i}", kind, cname, v, w)
                    self.edge_index[e.name] = len(self.edges)
                    out_edge[(kind, v)] = len(self.edges)
                    in_edge[(kind, w)] = len(self.edges)
                    self.edges.append(e)
        self.n_graph_edges = len(self.edges)
        # counterclockwise half-edges, each (edge index, 'out'|'in')
        self.rotation: dict[str, list[tuple[int, str]]] = {}
        for p in d.points:
            ao, ai = (out_edge[("a", p.name)], "out"), (in_edge[("a", p.name)], "in")
            bo, bi = (out_edge[("b", p.name)], "out"), (in_edge[("b", p.name)], "in")
            self.rotation[p.name] = [ao, bo, ai, bi] if p.sign > 0 else [ao, bi, ai, bo]
        # trace boundary cycles; dart = (edge, +1|-1)
        self.dart_cycle: dict[tuple[int, int], int] = {}
        self.cycles: list[list[tuple[tuple[int, int], tuple[str, int]]]] = []
        self.corner_cycle: dict[tuple[str, int], int] = {}
        for e in range(self.n_graph_edges):
            for s in (1, -1):
                if (e, s) in self.dart_cycle:
                    continue
                cyc = []
                dart = (e, s)
                while dart not in self.dart_cycle:
                    self.dart_cycle[dart] = len(self.cycles)
                    ed = self.edges[dart[0]]
                    v = ed.head if dart[1] > 0 else ed.tail
                    h = (dart[0], "in" if dart[1] > 0 else "out")
                    rot = self.rotation[v]
                    i = rot.index(h)
                    k = (i - 1) % 4
                    nxt = rot[k]
                    cyc.append((dart, (v, k)))
                    self.corner_cycle[(v, k)] = len(self.cycles)
                    dart = (nxt[0], 1 if nxt[1] == "out" else -1)
                self.cycles.append(cyc)
        # group cycles into regions
        self.regions: list[Region] = []
        self.region_index: dict[str, int] = {}
        assigned: dict[int, int] = {}
        for rname, corners in d.regions:
            cyc_ids = []
            for c in corners:
                cc = _parse_corner(c)
                if cc not in self.corner_cycle:
                    self._fail(f"region {rname}: unknown corner {c}")
                    continue
                ci = self.corner_cycle[cc]
                if ci in cyc_ids or ci in assigned:
                    self._fail(f"region {rname}: boundary cycle listed twice")
                    continue
                cyc_ids.append(ci)
            if rname in self.region_index:
                self._fail(f"duplicate region name {rname}")
            for ci in cyc_ids:
                assigned[ci] = len(self.regions)
            self.region_index[rname] = len(self.regions)
            self.regions.append(Region(rname, cyc_ids))
        for ci, cyc in enumerate(self.cycles):
            if ci in assigned:
                continue
            name = "R(" + _corner_name(min(c for _, c in cyc)) + ")"
            assigned[ci] = len(self.regions)
            self.region_index[name] = len(self.regions)
            self.regions.append(Region(name, [ci]))
        self.cycle_region = assigned
        for r in self.regions:
            for ci in r.cycles:
                r.corners.extend(c for _, c in self.cycles[ci])
        self.corner_region = {c: assigned[ci] for c, ci in self.corner_cycle.items()}
        self.dart_region = {dt: assigned[ci] for dt, ci in self.dart_cycle.items()}
        # seams joining the boundary cycles of multi-cycle regions
        self.face_words: list[list[tuple[int, int]]] = []
        for ri, r in enumerate(self.regions):
            word = []
            starts = []
            for ci in r.cycles:
                cyc = self.cycles[ci]
                starts.append(cyc[0][1][0])
            first = True
            for j, ci in enumerate(r.cycles):
                cyc = self.cycles[ci]
                # begin right after the first corner: leaves its vertex
                darts = [dt for dt, _ in cyc[1:]] + [cyc[0][0]]
                if j == 0:
                    word.extend(darts)
                    continue
                sname = f"seam:{r.name}:{j}"
                self.edge_index[sname] = len(self.edges)
                sid = len(self.edges)
                self.edges.append(Edge(sname, "s", r.name, starts[0], starts[j]))
                word.append((sid, 1))
                word.extend(darts)
                word.append((sid, -1))
                first = False
            self.face_words.append(word)
        for ri, word in enumerate(self.face_words):
            for dt in word:
                if self.edges[dt[0]].kind == "s":
                    self.dart_region[dt] = ri
        self.basepoint_region: dict[str, int] = {}
        for z, ref in d.basepoints:
            if ref in self.region_index:
                self.basepoint_region[z] = self.region_index[ref]
            else:
                try:
                    cc = _parse_corner(ref)
                except ValueError:
                    self._fail(f"basepoint {z}: unknown region {ref}")
                    continue
                if cc not in self.corner_region:
                    self._fail(f"basepoint {z}: unknown corner {ref}")
                    continue
                self.basepoint_region[z] = self.corner_region[cc]

    # -- chains -------------------------------------------------------
    def left(self, e: int) -> int:
        return self.dart_region[(e, 1)]

    def right(self, e: int) -> int:
        return self.dart_region[(e, -1)]

    def face_boundary(self, ri: int) -> list[int]:
        vec = [0] * len(self.edges)
        for e, s in self.face_words[ri]:
            vec[e] += s
        return vec

    @cached_property
    def tree(self) -> set[int]:
        """Spanning tree edges of the 1-skeleton (including seams)."""
        pts = [p.name for p in self.d.points]
        if not pts:
            return set()
        adj: dict[str, list[tuple[int, str]]] = {p: [] for p in pts}
        for i, e in enumerate(self.edges):
            adj[e.tail].append((i, e.head))
            adj[e.head].append((i, e.tail))
        seen = {pts[0]}
        queue = [pts[0]]
        tree = set()
        while queue:
            v = queue.pop(0)
            for i, w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    tree.add(i)
                    queue.append(w)
        self.connected = len(seen) == len(pts)
        return tree

    @cached_property
    def nontree(self) -> list[int]:
        t = self.tree
        return [i for i in range(len(self.edges)) if i not in t]

    def cycle_coords(self, chain: Sequence[int]) -> list[int]:
        return [chain[i] for i in self.nontree]

    def curve_chain(self, kind: str, cname: str) -> list[int]:
        vec = [0] * len(self.edges)
        for i, e in enumerate(self.edges):
            if e.kind == kind and e.curve == cname:
                vec[i] = 1
        return vec

    @cached_property
    def surface_h1(self):
        """(invariants, V) presenting H1 of the surface on nontree coords."""
        rel = [self.cycle_coords(self.face_boundary(r)) for r in range(len(self.regions))]
        return zlinalg.quotient_coords(rel, len(self.nontree))

    @cached_property
    def manifold_relations(self) -> list[list[int]]:
        rel = [self.cycle_coords(self.face_boundary(r)) for r in range(len(self.regions))]
        for kind, curves in (("a", self.d.alphas), ("b", self.d.betas)):
            for cname, _ in curves:
                rel.append(self.cycle_coords(self.curve_chain(kind, cname)))
        return rel

    @cached_property
    def manifold_h1(self):
        return zlinalg.quotient_coords(self.manifold_relations, len(self.nontree))

    def edge_translation(self, e: int) -> tuple[int, ...]:
        """Class in H1(surface) of the fundamental cycle through edge e."""
        inv, v = self.surface_h1
        if e in self.tree:
            return tuple(0 for _ in inv)
        j = self.nontree.index(e)
        return tuple(v[j])

    def components_without(self, kind: str) -> list[set[int]]:
        """Regions grouped into components of the surface cut along curves of ``kind``."""
        parent = list(range(len(self.regions)))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for i, e in enumerate(self.edges):
            if e.kind != kind:
                a, b = find(self.left(i)), find(self.right(i))
                parent[a] = b
        comps: dict[int, set[int]] = {}
        for r in range(len(self.regions)):
            comps.setdefault(find(r), set()).add(r)
        return list(comps.values())


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    error: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def validate(d: HeegaardDiagram) -> ValidationReport:
    def bad(msg):
        return ValidationReport(False, msg)

    if d.genus < 0:
        return bad("negative genus")
    if len(d.alphas) != len(d.betas):
        return bad("alpha and beta counts differ")
    names = [a for a, _ in d.alphas] + [b for b, _ in d.betas]
    if len(set(names)) != len(names):
        return bad("duplicate curve name")
    pnames = [p.name for p in d.points]
    if len(set(pnames)) != len(pnames):
        return bad("duplicate point name")
    for p in d.points:
        if p.sign not in (1, -1):
            return bad(f"point {p.name}: sign must be +1 or -1")
        if any(ch in p.name for ch in "⊗+/ ,"):
            return bad(f"point {p.name}: reserved character in name")
    for kind, curves, attr in (("alpha", d.alphas, "alpha"), ("beta", d.betas, "beta")):
        seen: set = set()
        for cname, order in curves:
            if not order:
                return bad(f"{kind} {cname} has no intersection points")
            if len(set(order)) != len(order):
                return bad(f"{kind} {cname} visits a point twice")
            for v in order:
                if v not in d.point:
                    return bad(f"{kind} {cname}: unknown point {v}")
                if getattr(d.point[v], attr) != cname:
                    return bad(f"point {v} is not on {kind} {cname}")
            seen.update(order)
        if seen != set(pnames):
            return bad(f"some point is missing from the {kind} curves")
    s = d.structure
    if s.error:
        return bad(s.error)
    _ = s.tree
    if not s.connected:
        return bad("cell structure is disconnected")
    v, e = len(d.points), s.n_graph_edges
    if v - e + sum(r.chi for r in s.regions) != 2 - 2 * d.genus:
        return bad("Euler characteristic mismatch (V - E + F != 2 - 2g)")
    inv, _ = s.surface_h1
    if inv != [0] * (2 * d.genus):
        return bad("region data does not close up to a genus-g surface")
    if not d.basepoints:
        return bad("no basepoints")
    zr = [s.basepoint_region[z] for z in d.basepoint_names]
    if len(set(zr)) != len(zr):
        return bad("basepoints share region")
    if len(set(d.basepoint_names)) != len(zr):
        return bad("duplicate basepoint name")
    if len(d.alphas) != d.genus + len(d.basepoints) - 1:
        return bad("curve count must equal genus + basepoints - 1")
    for kind, label in (("a", "alpha"), ("b", "beta")):
        for comp in s.components_without(kind):
            if len([r for r in zr if r in comp]) != 1:
                return bad(f"{label} curves are not independent "
                           "(a complementary component misses or repeats a basepoint)")
    for lname, word in d.loops:
        try:
            _loop_crossings(d, word)
        except ValueError as exc:
            return bad(f"loop {lname}: {exc}")
    return ValidationReport(True)


def _require_valid(d: HeegaardDiagram):
    rep = validate(d)
    if not rep:
        raise ValueError(f"invalid diagram: {rep.error}")


# -- generators and domains -------------------------------------------------

@dataclass(frozen=True, order=True)
class Generator:
    points: tuple[str, ...]  # one point per alpha curve, in alpha order

    @property
    def name(self) -> str:
        return "/".join(self.points)

    def __str__(self) -> str:
        return self.name


def generators(d: HeegaardDiagram) -> list[Generator]:
    alphas = d.alpha_names
    betas = d.beta_names
    by_pair: dict[tuple[str, str], list[str]] = {}
    for p in d.points:
        by_pair.setdefault((p.alpha, p.beta), []).append(p.name)
    out = []
    for perm in itertools.permutations(betas):
        choices = [sorted(by_pair.get((a, b), [])) for a, b in zip(alphas, perm)]
        for combo in itertools.product(*choices):
            out.append(Generator(tuple(combo)))
    return sorted(out, key=lambda g: g.name)


@dataclass(frozen=True)
class Domain:
    mult: tuple[int, ...]  # one integer per region, in structure order
    source: Generator
    target: Generator

    def __add__(self, other: "Domain") -> "Domain":
        if self.target != other.source:
            raise ValueError("domains are not juxtaposable")
        return Domain(tuple(a + b for a, b in zip(self.mult, other.mult)),
                      self.source, other.target)

    def is_positive(self) -> bool:
        return all(m >= 0 for m in self.mult)


@dataclass(frozen=True)
class DomainLattice:
    particular: tuple[int, ...] | None
    basis: tuple[tuple[int, ...], ...]
    source: Generator
    target: Generator

    @property
    def empty(self) -> bool:
        return self.particular is None

    def element(self, coeffs: Sequence[int]) -> Domain:
        if self.particular is None:
            raise ValueError("empty lattice")
        m = list(self.particular)
        for c, b in zip(coeffs, self.basis):
            m = [x + c * y for x, y in zip(m, b)]
        return Domain(tuple(m), self.source, self.target)


def _boundary_system(d: HeegaardDiagram, x: Generator, y: Generator,
                     basepoints: Sequence[str] = ()):
    s = d.structure
    nreg = len(s.regions)
    rows, rhs = [], []
    xs, ys = set(x.points), set(y.points)
    for kind in ("a", "b"):
        inc: dict[str, list[int]] = {}
        for i in range(s.n_graph_edges):
            e = s.edges[i]
            if e.kind != kind:
                continue
            coef = [0] * nreg
            coef[s.left(i)] += 1
            coef[s.right(i)] -= 1
            for v, sgn in ((e.head, 1), (e.tail, -1)):
                row = inc.setdefault(v, [0] * nreg)
                for r in range(nreg):
                    row[r] += sgn * coef[r]
        for p in d.points:
            v = p.name
            rows.append(inc[v])
            want = int(v in ys) - int(v in xs)
            rhs.append(want if kind == "a" else -want)
    for z in basepoints:
        row = [0] * nreg
        row[s.basepoint_region[z]] = 1
        rows.append(row)
        rhs.append(0)
    return rows, rhs


def domains(d: HeegaardDiagram, x: Generator, y: Generator,
            basepoints: Sequence[str] = ()) -> DomainLattice:
    """Affine lattice of region vectors with boundary from x to y.

    Multiplicity at each named basepoint is forced to zero.
    """
    rows, rhs = _boundary_system(d, x, y, basepoints)
    nreg = len(d.structure.regions)
    sol = zlinalg.solve_integer(rows, rhs, nreg)
    if sol is None:
        kernel = zlinalg.integer_kernel(rows, nreg)
        return DomainLattice(None, tuple(map(tuple, kernel)), x, y)
    part, kernel = sol
    return DomainLattice(tuple(part), tuple(map(tuple, kernel)), x, y)


def point_multiplicity(d: HeegaardDiagram, mult: Sequence[int], v: str) -> Fraction:
    s = d.structure
    return Fraction(sum(mult[s.corner_region[(v, k)]] for k in range(4)), 4)


def maslov_index(d: HeegaardDiagram, phi: Domain) -> int:
    s = d.structure
    e = sum(m * r.euler_measure for m, r in zip(phi.mult, s.regions))
    nx = sum(point_multiplicity(d, phi.mult, v) for v in phi.source.points)
    ny = sum(point_multiplicity(d, phi.mult, v) for v in phi.target.points)
    mu = e + nx + ny
    if mu.denominator != 1:
        raise ValueError("non-integral Maslov index (domain is not boundary compatible)")
    return int(mu)


def n_z(d: HeegaardDiagram, mult: Sequence[int], z: str | None = None) -> int:
    s = d.structure
    z = z if z is not None else d.basepoint_names[0]
    return mult[s.basepoint_region[z]]


def periodic_domains(d: HeegaardDiagram) -> list[tuple[int, ...]]:
    """Basis of periodic domains (zero multiplicity at every basepoint)."""
    _require_valid(d)
    g = generators(d)[0]
    lat = domains(d, g, g, d.basepoint_names)
    return [tuple(b) for b in lat.basis]


def admissibility_certificate(d: HeegaardDiagram) -> tuple[int, ...] | None:
    """A nonzero nonnegative periodic domain, or None when admissible."""
    basis = periodic_domains(d)
    if not basis:
        return None
    r = len(basis)
    nreg = len(basis[0])
    a = [[basis[j][i] for j in range(r)] for i in range(nreg)]
    b = [0] * nreg
    a.append([sum(basis[j][i] for i in range(nreg)) for j in range(r)])
    b.append(1)
    c = zlinalg.fm_feasible_point(a, b, r)
    if c is None:
        return None
    den = 1
    for q in c:
        den = den * q.denominator // _gcd(den, q.denominator)
    ci = [int(q * den) for q in c]
    g = 0
    for q in ci:
        g = _gcd(g, abs(q))
    ci = [q // g for q in ci]
    return tuple(sum(ci[j] * basis[j][i] for j in range(r)) for i in range(nreg))


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def is_weakly_admissible(d: HeegaardDiagram) -> bool:
    return admissibility_certificate(d) is None


# -- homology and Spin^c ----------------------------------------------------

@dataclass(frozen=True)
class SpincPartition:
    invariants: tuple[int, ...]  # H1(Y) = sum of Z/n (0 means Z)
    relations: tuple[tuple[int, ...], ...]
    classes: tuple[tuple[str, tuple[Generator, ...]], ...]
    label_of: dict = field(compare=False, hash=False)

    @property
    def h1_text(self) -> str:
        if not self.invariants:
            return "0"
        return " + ".join("Z" if n == 0 else f"Z/{n}" for n in self.invariants)

    @property
    def is_finite(self) -> bool:
        return all(n != 0 for n in self.invariants)

    @property
    def order(self) -> int | None:
        if not self.is_finite:
            return None
        out = 1
        for n in self.invariants:
            out *= n
        return out

    def class_of(self, g: Generator | str) -> str:
        return self.label_of[g.name if isinstance(g, Generator) else g]


def _arc(order: Sequence[str], start: str, end: str) -> list[int]:
    """Edge positions of the forward arc from start to end along a curve."""
    i = order.index(start)
    out = []
    while order[i] != end:
        out.append(i)
        i = (i + 1) % len(order)
    return out


def epsilon(d: HeegaardDiagram, x: Generator, y: Generator) -> tuple[int, ...]:
    """Coordinates of the difference class of x and y in H1(Y)."""
    s = d.structure
    chain = [0] * len(s.edges)
    for cname, order in d.alphas:
        xi = next(v for v in x.points if d.point[v].alpha == cname)
        yi = next(v for v in y.points if d.point[v].alpha == cname)
        for i in _arc(order, xi, yi):
            chain[s.edge_index[f"{cname}.{i}"]] += 1
    for cname, order in d.betas:
        xi = next(v for v in x.points if d.point[v].beta == cname)
        yi = next(v for v in y.points if d.point[v].beta == cname)
        for i in _arc(order, yi, xi):
            chain[s.edge_index[f"{cname}.{i}"]] += 1
    inv, v = s.manifold_h1
    coords = s.cycle_coords(chain)
    out = []
    for j, n in enumerate(inv):
        c = sum(coords[i] * v[i][j] for i in range(len(coords)))
        out.append(c % n if n else c)
    return tuple(out)


def h1_and_spinc(d: HeegaardDiagram) -> SpincPartition:
    _require_valid(d)
    s = d.structure
    inv, _ = s.manifold_h1
    gens = generators(d)
    ref = gens[0]
    groups: dict[tuple[int, ...], list[Generator]] = {}
    for g in gens:
        groups.setdefault(epsilon(d, g, ref), []).append(g)
    classes = []
    label_of = {}
    for key in sorted(groups):
        label = ",".join(str(c) for c in key) if key else "0"
        classes.append((label, tuple(groups[key])))
        for g in groups[key]:
            label_of[g.name] = label
    rel = tuple(tuple(r) for r in s.manifold_relations)
    return SpincPartition(tuple(inv), rel, tuple(classes), label_of)


# -- loops --------------------------------------------------------------------

def _loop_crossings(d: HeegaardDiagram, word: Sequence[str]) -> list[tuple[int, int, int]]:
    """Decode a loop word into (edge, region before, region after) triples.

    Each token is ``+e`` (crossing edge e from its left side to its right
    side) or ``-e`` (right to left).
    """
    s = d.structure
    out = []
    for tok in word:
        if not tok or tok[0] not in "+-":
            raise ValueError(f"bad crossing {tok!r}")
        name = tok[1:]
        if name not in s.edge_index or s.edges[s.edge_index[name]].kind == "s":
            raise ValueError(f"unknown edge {name!r}")
        e = s.edge_index[name]
        a, b = s.left(e), s.right(e)
        out.append((e, a, b) if tok[0] == "+" else (e, b, a))
    if not out:
        return out
    for (_, _, after), (_, before, _) in zip(out, out[1:] + out[:1]):
        if after != before:
            raise ValueError("consecutive crossings do not share a region")
    return out


def loop_pairing(d: HeegaardDiagram, word: Sequence[str], mult: Sequence[int]) -> int:
    """Sum over alpha crossings of the multiplicity jump of a domain."""
    s = d.structure
    total = 0
    for e, before, after in _loop_crossings(d, word):
        if s.edges[e].kind == "a":
            total += mult[after] - mult[before]
    return total


def loop_is_torsion(d: HeegaardDiagram, word: Sequence[str]) -> bool:
    return all(loop_pairing(d, word, p) == 0 for p in periodic_domains(d))


# -- (0,3)-stabilization ------------------------------------------------------

@dataclass(frozen=True)
class Stabilization:
    diagram: HeegaardDiagram
    plus: str
    minus: str
    alignment: tuple[tuple[str, str, str], ...]  # (new gen, old gen, theta)


def stabilize03(d: HeegaardDiagram, region: str, new_point: str) -> Stabilization:
    """Add a basepoint with a new alpha/beta pair meeting twice.

    ``region`` must be a region holding an existing basepoint (a region
    name or a corner reference). The small circles sit inside it; the new
    basepoint goes in their common lens.
    """
    _require_valid(d)
    s = d.structure
    if region in s.region_index:
        ri = s.region_index[region]
    else:
        try:
            ri = s.corner_region[_parse_corner(region)]
        except (ValueError, KeyError):
            raise ValueError(f"unknown region {region!r}") from None
    if ri not in s.basepoint_region.values():
        raise ValueError("region not eligible: it holds no basepoint")
    if new_point in d.basepoint_names:
        raise ValueError(f"basepoint {new_point!r} already exists")
    pa, pb = f"{new_point}A", f"{new_point}B"
    an, bn = f"a_{new_point}", f"b_{new_point}"
    for n in (pa, pb):
        if n in d.point:
            raise ValueError(f"point name {n!r} already used")
    small = HeegaardDiagram(0, ((an, (pa, pb)),), ((bn, (pa, pb)),),
                            (Point(pa, an, bn, 1), Point(pb, an, bn, -1)))
    ss = small.structure
    # pick the outer cycle and the lens: the two cycles sharing no edge
    edges_of = [{dt[0] for dt, _ in c} for c in ss.cycles]
    outer = 0
    lens = next(i for i in range(len(ss.cycles)) if not edges_of[i] & edges_of[outer])
    outer_corner = _corner_name(ss.cycles[outer][0][1])
    lens_corner = _corner_name(ss.cycles[lens][0][1])
    r = s.regions[ri]
    old_corners = [_corner_name(s.cycles[ci][0][1]) for ci in r.cycles]
    groups = []
    for name, corners in d.regions:
        if s.region_index[name] != ri:
            groups.append((name, corners))
    groups.append((r.name, tuple(old_corners) + (outer_corner,)))
    # keep basepoint references stable by pointing them at corners
    bps = []
    for z, ref in d.basepoints:
        zr = s.basepoint_region[z]
        bps.append((z, r.name if zr == ri else ref))
    bps.append((new_point, lens_corner))
    nd = HeegaardDiagram(
        d.genus, d.alphas + small.alphas, d.betas + small.betas,
        d.points + small.points, tuple(groups), tuple(bps), d.loops)
    _require_valid(nd)
    # the source corner of the lunes is theta+
    ns = nd.structure
    lunes = [i for i, reg in enumerate(ns.regions)
             if {c[0] for c in reg.corners} == {pa, pb} and len(reg.cycles) == 1
             and i not in ns.basepoint_region.values()]
    src = {c[0] for i in lunes for c in ns.regions[i].corners if c[1] % 2 == 0}
    if len(src) != 1:
        raise ValueError("stabilization lunes are inconsistent")
    plus = src.pop()
    minus = pb if plus == pa else pa
    align = []
    for g in generators(nd):
        rest = tuple(v for v in g.points if v not in (pa, pb))
        theta = "θ+" if plus in g.points else "θ-"
        align.append((g.name, Generator(rest).name, theta))
    return Stabilization(nd, plus, minus, tuple(align))
