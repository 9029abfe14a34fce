"""Floer differentials, homology operators and the built-in model library."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import floor
from pathlib import Path
from typing import Mapping, Sequence

from . import diagram as dg
from . import gf2, zlinalg
from .diagram import Domain, Generator, HeegaardDiagram
from .gf2 import Gf2Map, LabeledSpace, THETA_MINUS, THETA_PLUS

__all__ = [
    "ChainLevelData", "FloerPackage", "IndexOneClass", "generator_space",
    "d0_nice", "d_genus1", "index_one_classes", "h1_action", "package",
    "model", "tensor_packages", "builtin_diagram", "parse_manifold",
    "FIXTURE_DIR", "multiplicity_bound", "is_nice",
]

FIXTURE_DIR = Path(__file__).with_name("fixtures")


def generator_space(d: HeegaardDiagram) -> LabeledSpace:
    return gf2.make_space([g.name for g in dg.generators(d)])


@dataclass(frozen=True)
class ChainLevelData:
    d0: Gf2Map
    d1: Gf2Map | None
    terms: tuple[Gf2Map, ...]  # d_0 .. d_N

    def check(self) -> None:
        d0 = self.d0
        if not (d0 @ d0).is_zero():
            raise ValueError("d0∘d0 != 0")
        if self.d1 is not None and not (d0 @ self.d1 + self.d1 @ d0).is_zero():
            raise ValueError("d0 d1 + d1 d0 != 0")
        if len(self.terms) > 2:
            d1, d2 = self.terms[1], self.terms[2]
            if not (d1 @ d1 + d0 @ d2 + d2 @ d0).is_zero():
                raise ValueError("d1² + d0 d2 + d2 d0 != 0")


def _require_single_curve_data(d: HeegaardDiagram):
    rep = dg.validate(d)
    if not rep:
        raise ValueError(f"invalid diagram: {rep.error}")
    cert = dg.admissibility_certificate(d)
    if cert is not None:
        raise ValueError(f"diagram is not weakly admissible; periodic domain {list(cert)}")


# -- nice diagrams ------------------------------------------------------------

def nice_regions(d: HeegaardDiagram) -> list[tuple[int, tuple[str, ...], tuple[str, ...]]]:
    """Basepoint-free regions as (region, source corners, target corners).

    Raises ValueError when some basepoint-free region is not an embedded
    bigon or rectangle.
    """
    s = d.structure
    occupied = set(s.basepoint_region.values())
    out = []
    for ri, r in enumerate(s.regions):
        if ri in occupied:
            continue
        if len(r.cycles) != 1 or len(r.corners) not in (2, 4):
            raise ValueError(f"diagram is not nice: region {r.name} is not a bigon or rectangle")
        src = tuple(sorted(c[0] for c in r.corners if c[1] % 2 == 0))
        tgt = tuple(sorted(c[0] for c in r.corners if c[1] % 2 == 1))
        out.append((ri, src, tgt))
    return out


def is_nice(d: HeegaardDiagram) -> bool:
    try:
        nice_regions(d)
    except ValueError:
        return False
    return True


def _nice_disks(d: HeegaardDiagram):
    """Yield (x, y, region) for every empty embedded disk missing the basepoints."""
    gens = dg.generators(d)
    names = {g.points: g for g in gens}
    for ri, src, tgt in nice_regions(d):
        pts = src + tgt
        if len(set(pts)) != len(pts):
            continue  # immersed corners: never a disk between generators
        if len({d.point[u].alpha for u in src}) != len(src):
            continue
        for x in gens:
            if not set(src) <= set(x.points):
                continue
            new = list(x.points)
            for u in src:
                # replace u by the target corner on the same alpha curve
                v = next(w for w in tgt if d.point[w].alpha == d.point[u].alpha)
                new[new.index(u)] = v
            key = tuple(new)
            y = names.get(key)
            if y is None:
                continue
            yield x, y, ri


def d0_nice(d: HeegaardDiagram) -> Gf2Map:
    """Count empty embedded bigons and rectangles missing every basepoint."""
    _require_single_curve_data(d)
    space = generator_space(d)
    images: dict[str, list[str]] = {}
    for x, y, ri in _nice_disks(d):
        mult = [0] * len(d.structure.regions)
        mult[ri] = 1
        if dg.maslov_index(d, Domain(tuple(mult), x, y)) != 1:
            raise ValueError("nice region with Maslov index != 1")
        images.setdefault(x.name, []).append(y.name)
    return gf2.from_dict(space, space, images)


# -- genus one: plane cover ---------------------------------------------------

@dataclass(frozen=True)
class IndexOneClass:
    source: Generator
    target: Generator
    domain: Domain
    nz: int


def _face_offsets(s: dg.Structure) -> list[list[tuple[int, ...]]]:
    out = []
    for word in s.face_words:
        o = (0, 0)
        offs = []
        for e, sign in word:
            offs.append(o)
            t = s.edge_translation(e)
            o = (o[0] + sign * t[0], o[1] + sign * t[1])
        if o != (0, 0):
            raise ValueError("face boundary does not close in the plane cover")
        out.append(offs)
    return out


def _plane_adjacency(s: dg.Structure):
    """For each edge: (left region, offset of forward dart, right region, offset of backward dart)."""
    offs = _face_offsets(s)
    where: dict[tuple[int, int], tuple[int, tuple[int, ...]]] = {}
    for ri, word in enumerate(s.face_words):
        for (e, sign), o in zip(word, offs[ri]):
            where[(e, sign)] = (ri, o)
    adj = []
    for e in range(len(s.edges)):
        (r1, o1), (r2, o2) = where[(e, 1)], where[(e, -1)]
        adj.append((r1, o1, r2, o2))
    return adj, offs


def _walk(s: dg.Structure, kind: str, start: str, steps: int):
    """Vertices reachable along a lifted curve, with the chain to reach them."""
    edges = [i for i in range(s.n_graph_edges) if s.edges[i].kind == kind]
    out_of = {s.edges[i].tail: i for i in edges}
    into = {s.edges[i].head: i for i in edges}
    found: dict[tuple[str, tuple[int, int]], dict] = {}
    for direction in (1, -1):
        v, t = start, (0, 0)
        chain: dict[tuple[int, tuple[int, int]], int] = {}
        for _ in range(steps):
            if direction > 0:
                e = out_of[v]
                tau = s.edge_translation(e)
                key = (e, t)
                v, t = s.edges[e].head, (t[0] + tau[0], t[1] + tau[1])
            else:
                e = into[v]
                tau = s.edge_translation(e)
                t = (t[0] - tau[0], t[1] - tau[1])
                key = (e, t)
                v = s.edges[e].tail
            chain = dict(chain)
            chain[key] = chain.get(key, 0) + direction
            found[(v, t)] = chain
    return found


def _winding(s: dg.Structure, chain: Mapping, adj, offs) -> list[int]:
    """Project the plane region bounded by a closed lifted chain."""
    ts = [t for (_, t) in chain] or [(0, 0)]
    margin = 2 + max((abs(c) for row in offs for o in row for c in o), default=0)
    for tau in (s.edge_translation(e) for e in range(len(s.edges))):
        margin = max(margin, 2 + abs(tau[0]) + abs(tau[1]))
    lo = (min(t[0] for t in ts) - margin, min(t[1] for t in ts) - margin)
    hi = (max(t[0] for t in ts) + margin, max(t[1] for t in ts) + margin)

    def inside(t):
        return lo[0] <= t[0] <= hi[0] and lo[1] <= t[1] <= hi[1]

    nreg = len(s.regions)
    # neighbour lists per region: (edge, is_left, other region, delta t)
    nbrs: list[list] = [[] for _ in range(nreg)]
    for e, (r1, o1, r2, o2) in enumerate(adj):
        tau = s.edge_translation(e)
        delta = (o1[0] - o2[0] + tau[0], o1[1] - o2[1] + tau[1])
        nbrs[r1].append((e, o1, True, r2, delta))
        nbrs[r2].append((e, o1, False, r1, (-delta[0], -delta[1])))
    w: dict[tuple[int, tuple[int, int]], int] = {}
    start = (0, lo)
    w[start] = 0
    queue = [start]
    while queue:
        r, t = queue.pop()
        for e, o1, is_left, r2, delta in nbrs[r]:
            t2 = (t[0] + delta[0], t[1] + delta[1])
            if not inside(t2):
                continue
            base = (t[0] + o1[0], t[1] + o1[1]) if is_left else (t2[0] + o1[0], t2[1] + o1[1])
            c = chain.get((e, base), 0) if s.edges[e].kind != "s" else 0
            val = w[(r, t)] - c if is_left else w[(r, t)] + c
            if (r2, t2) in w:
                if w[(r2, t2)] != val:
                    raise ValueError("lifted chain is not a boundary")
                continue
            w[(r2, t2)] = val
            queue.append((r2, t2))
    mult = [0] * nreg
    for (r, t), val in w.items():
        if val and (t[0] in (lo[0], hi[0]) or t[1] in (lo[1], hi[1])):
            raise ValueError("plane-cover window too small")
        mult[r] += val
    return mult


def multiplicity_bound(d: HeegaardDiagram, x: Generator, y: Generator, max_order: int) -> int | None:
    """Largest multiplicity of a positive class from x to y with n_z <= N."""
    lat = dg.domains(d, x, y)
    if lat.empty:
        return None
    s = d.structure
    z = s.basepoint_region[d.basepoint_names[0]]
    r = len(lat.basis)
    nreg = len(lat.particular)
    best = None
    for target in range(nreg):
        a, b = [], []
        for i in range(nreg):
            a.append([lat.basis[j][i] for j in range(r)] + [0])
            b.append(-lat.particular[i])
        a.append([-lat.basis[j][z] for j in range(r)] + [0])
        b.append(lat.particular[z] - max_order)
        a.append([-lat.basis[j][target] for j in range(r)] + [1])
        b.append(lat.particular[target])
        a.append([lat.basis[j][target] for j in range(r)] + [-1])
        b.append(-lat.particular[target])
        bounds = zlinalg.fm_bounds(a, b, r + 1, r)
        if bounds is False:
            return None
        hi = bounds[1]
        if hi is None:
            raise ValueError("positive domains are unbounded; diagram not admissible")
        best = floor(hi) if best is None else max(best, floor(hi))
    return best


def index_one_classes(d: HeegaardDiagram, max_order: int = 2) -> list[IndexOneClass]:
    """Positive index-one classes with n_z <= max_order (genus one, plane cover)."""
    _require_single_curve_data(d)
    if d.genus != 1 or len(d.alphas) != 1 or len(d.basepoints) != 1:
        raise ValueError("plane-cover counting needs a genus-1 diagram with one basepoint")
    if max_order < 0:
        raise ValueError("max_order must be nonnegative")
    s = d.structure
    adj, offs = _plane_adjacency(s)
    gens = dg.generators(d)
    npts = len(d.points)
    out = []
    for x in gens:
        m = 0
        for y in gens:
            b = multiplicity_bound(d, x, y, max_order)
            if b is not None:
                m = max(m, b)
        steps = (m + 1) * npts
        xv = x.points[0]
        along_a = _walk(s, "a", xv, steps)
        along_b = _walk(s, "b", xv, steps)
        for key in sorted(set(along_a) & set(along_b)):
            v, t = key
            if v == xv and t == (0, 0):
                continue
            chain = dict(along_a[key])
            for k, c in along_b[key].items():
                chain[k] = chain.get(k, 0) - c
            chain = {k: c for k, c in chain.items() if c}
            mult = _winding(s, chain, adj, offs)
            y = Generator((v,))
            dom = Domain(tuple(mult), x, y)
            if not dom.is_positive():
                continue
            nz = dg.n_z(d, mult)
            if nz > max_order or dg.maslov_index(d, dom) != 1:
                continue
            out.append(IndexOneClass(x, y, dom, nz))
    return out


def d_genus1(d: HeegaardDiagram, max_order: int = 2) -> ChainLevelData:
    space = generator_space(d)
    images = [dict() for _ in range(max_order + 1)]
    for c in index_one_classes(d, max_order):
        images[c.nz].setdefault(c.source.name, []).append(c.target.name)
    terms = tuple(gf2.from_dict(space, space, im) for im in images)
    data = ChainLevelData(terms[0], terms[1] if max_order >= 1 else None, terms)
    data.check()
    return data


def h1_action(d: HeegaardDiagram, loop: str | Sequence[str], method: str = "auto",
              max_order: int = 2) -> Gf2Map:
    """Chain-level action of a dual loop: disks weighted by alpha crossings."""
    word = d.loop(loop) if isinstance(loop, str) else tuple(loop)
    _require_single_curve_data(d)
    space = generator_space(d)
    if method == "auto":
        method = "plane" if d.genus == 1 and len(d.alphas) == 1 else "nice"
    images: dict[str, list[str]] = {}
    if method == "plane":
        for c in index_one_classes(d, max_order):
            if c.nz == 0 and dg.loop_pairing(d, word, c.domain.mult) % 2:
                images.setdefault(c.source.name, []).append(c.target.name)
    elif method == "nice":
        nreg = len(d.structure.regions)
        for x, y, ri in _nice_disks(d):
            mult = [0] * nreg
            mult[ri] = 1
            if dg.loop_pairing(d, word, mult) % 2:
                images.setdefault(x.name, []).append(y.name)
    else:
        raise ValueError(f"unknown method {method!r}")
    return gf2.from_dict(space, space, images)


# -- packages -----------------------------------------------------------------

@dataclass(frozen=True)
class FloerPackage:
    """Homology-level invariants of one (multi-)pointed 3-manifold."""

    name: str
    hf: LabeledSpace
    d1_star: Gf2Map | None
    h1: tuple[tuple[str, Gf2Map], ...]
    spinc_of: tuple[tuple[str, str], ...]  # hf label -> Spin^c class label
    torsion: tuple[tuple[str, bool], ...] = ()
    h1_group: str = ""
    spinc: dg.SpincPartition | None = field(default=None, compare=False)
    chain: ChainLevelData | None = field(default=None, compare=False)
    decoration: gf2.TensorDecoration | None = field(default=None, compare=False)

    @property
    def rank(self) -> int:
        return self.hf.dim

    def action(self, name: str) -> Gf2Map:
        for n, f in self.h1:
            if n == name:
                return f
        raise ValueError(f"no operator registered for class {name!r}")

    @property
    def classes(self) -> list[str]:
        return [n for n, _ in self.h1]

    def is_torsion(self, name: str) -> bool:
        return dict(self.torsion).get(name, False)

    @property
    def C(self) -> Gf2Map:
        if self.d1_star is None:
            raise ValueError(f"(d1)* is not available for {self.name}")
        return self.d1_star

    def spinc_classes(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {}
        for lab, c in self.spinc_of:
            out.setdefault(c, []).append(lab)
        return out

    def check(self) -> None:
        """Verify the package identities; raises ValueError on failure."""
        ops = [f for _, f in self.h1]
        if self.d1_star is not None:
            C = self.d1_star
            if not (C @ C).is_zero():
                raise ValueError("(d1)*∘(d1)* != 0")
            for f in ops:
                if C @ f != f @ C:
                    raise ValueError("(d1)* does not commute with an H1 operator")
            ops.append(C)
        for _, f in self.h1:
            if not (f @ f).is_zero():
                raise ValueError("[γ]∘[γ] != 0")
        cls = dict(self.spinc_of)
        for f in ops:
            for lab, col in zip(f.domain.labels, f.columns):
                if any(cls[t] != cls[lab] for t in col):
                    raise ValueError("operator is not Spin^c block diagonal")


def package(d: HeegaardDiagram, max_order: int = 2, name: str = "") -> FloerPackage:
    _require_single_curve_data(d)
    spinc = dg.h1_and_spinc(d)
    if d.genus == 1 and len(d.alphas) == 1:
        chain = d_genus1(d, max_order)
    else:
        chain = ChainLevelData(d0_nice(d), None, ())
        chain.check()
    hom = gf2.homology(chain.d0)
    C = hom.transport(chain.d1) if chain.d1 is not None else None
    ops = []
    tors = []
    for lname, word in d.loops:
        ops.append((lname, hom.transport(h1_action(d, word, max_order=max_order))))
        tors.append((lname, dg.loop_is_torsion(d, word)))
    spinc_of = []
    for lab, rep in zip(hom.space.labels, hom.section.columns):
        classes = {spinc.class_of(g) for g in rep}
        if len(classes) != 1:
            raise ValueError("homology representative mixes Spin^c classes")
        spinc_of.append((lab, classes.pop()))
    k = len(d.basepoints)
    pkg = FloerPackage(name or "diagram", hom.space, C, tuple(ops), tuple(spinc_of),
                       tuple(tors), spinc.h1_text, spinc, chain,
                       gf2.TensorDecoration(hom.space, k - 1, None))
    pkg.check()
    return pkg


def relabel_package(pkg: FloerPackage, mapping: Mapping[str, str], name: str | None = None) -> FloerPackage:
    def rl(f):
        return gf2.relabel(f, mapping, mapping) if f is not None else None

    hf = LabeledSpace(tuple(mapping.get(l, l) for l in pkg.hf.labels))
    return FloerPackage(name or pkg.name, hf, rl(pkg.d1_star),
                        tuple((n, rl(f)) for n, f in pkg.h1),
                        tuple((mapping.get(l, l), c) for l, c in pkg.spinc_of),
                        pkg.torsion, pkg.h1_group, pkg.spinc, pkg.chain,
                        gf2.TensorDecoration(hf, 0, None))


def relative_grading(d: HeegaardDiagram, x: Generator, y: Generator) -> int | None:
    """gr(x) - gr(y) = μ(φ) - 2 n_z(φ) for any φ from x to y."""
    lat = dg.domains(d, x, y)
    if lat.empty:
        return None
    phi = lat.element([0] * len(lat.basis))
    return dg.maslov_index(d, phi) - 2 * dg.n_z(d, phi.mult)


# -- model library ------------------------------------------------------------

_LENS = re.compile(r"^L\((\d+),1\)$")


def parse_manifold(name: str) -> tuple[str, ...]:
    """Split a manifold name into prime summands (S3 summands dropped)."""
    name = name.replace(" ", "").replace("²", "2")
    if name.startswith("#"):
        name = name[1:]  # "#2S1xS2" is two copies of S1xS2
    if not name:
        raise ValueError("empty manifold name")
    out = []
    for part in name.split("#"):
        m = re.match(r"^(\d+)?(S1xS2|S3|L\(\d+,1\))$", part)
        if not m:
            raise ValueError(f"unknown manifold {part!r}")
        count = int(m.group(1)) if m.group(1) else 1
        base = m.group(2)
        lm = _LENS.match(base)
        if lm:
            p = int(lm.group(1))
            if not 1 <= p <= 12:
                raise ValueError(f"lens space p={p} outside the model range 1..12")
            if p == 1:
                base = "S3"
        if base != "S3":
            out.extend([base] * count)
    return tuple(out)


def lens_diagram(p: int) -> HeegaardDiagram:
    from .textio import parse_diagram
    xs = [f"x{i}" for i in range(1, p + 1)]
    text = (f"genus 1\nalpha a: {' '.join(xs)}\nbeta b: {' '.join(xs)}\n"
            + "".join(f"point {x} a b +\n" for x in xs)
            + "basepoint z: x1.0\nloop tau: +a.0 +b.0\n")
    return parse_diagram(text)


def builtin_diagram(summand: str) -> HeegaardDiagram:
    from .textio import load_diagram
    if summand == "S3":
        return load_diagram(FIXTURE_DIR / "s3.hd")
    if summand == "S1xS2":
        return load_diagram(FIXTURE_DIR / "s1xs2.hd")
    m = _LENS.match(summand)
    if m:
        p = int(m.group(1))
        path = FIXTURE_DIR / f"L{p}_1.hd"
        return load_diagram(path) if path.exists() else lens_diagram(p)
    raise ValueError(f"no built-in diagram for {summand!r}")


@lru_cache(maxsize=None)
def _prime_model(summand: str, max_order: int = 2) -> FloerPackage:
    d = builtin_diagram(summand)
    pkg = package(d, max_order, summand)
    if summand == "S3":
        return relabel_package(pkg, {pkg.hf.labels[0]: "1"}, "S3")
    if summand == "S1xS2":
        a, b = [dg.Generator((l,)) for l in pkg.hf.labels]
        gr = relative_grading(d, a, b)
        if gr == 1:
            mapping = {a.name: THETA_PLUS, b.name: THETA_MINUS}
        elif gr == -1:
            mapping = {a.name: THETA_MINUS, b.name: THETA_PLUS}
        else:
            raise ValueError("unexpected grading on the S1xS2 model")
        pkg = relabel_package(pkg, mapping, "S1xS2")
        order = LabeledSpace((THETA_PLUS, THETA_MINUS))
        return _reorder(pkg, order)
    return pkg


def _reorder(pkg: FloerPackage, order: LabeledSpace) -> FloerPackage:
    def ro(f):
        if f is None:
            return None
        return gf2.Gf2Map(order, order, tuple(f.column(l) for l in order.labels))

    cls = dict(pkg.spinc_of)
    return FloerPackage(pkg.name, order, ro(pkg.d1_star), tuple((n, ro(f)) for n, f in pkg.h1),
                        tuple((l, cls[l]) for l in order.labels), pkg.torsion, pkg.h1_group,
                        pkg.spinc, pkg.chain, gf2.TensorDecoration(order, 0, None))


def tensor_packages(p: FloerPackage, q: FloerPackage, name: str | None = None,
                    suffixes: tuple[str, str] = ("", "")) -> FloerPackage:
    hf = gf2.tensor_spaces(p.hf, q.hf)
    ip, iq = gf2.identity(p.hf), gf2.identity(q.hf)
    C = None
    if p.d1_star is not None and q.d1_star is not None:
        C = gf2.tensor(p.d1_star, iq) + gf2.tensor(ip, q.d1_star)
    ops = [(n + suffixes[0], gf2.tensor(f, iq)) for n, f in p.h1]
    ops += [(n + suffixes[1], gf2.tensor(ip, f)) for n, f in q.h1]
    names = [n for n, _ in ops]
    if len(set(names)) != len(names):
        raise ValueError("colliding H1 class names in connected sum")
    tors = [(n + suffixes[0], t) for n, t in p.torsion] + [(n + suffixes[1], t) for n, t in q.torsion]
    cp, cq = dict(p.spinc_of), dict(q.spinc_of)
    spinc_of = tuple((f"{a}{gf2.TENSOR}{b}", f"{cp[a]};{cq[b]}") for a in p.hf.labels for b in q.hf.labels)
    group = " + ".join(g for g in (p.h1_group, q.h1_group) if g and g != "0") or "0"
    return FloerPackage(name or f"{p.name}#{q.name}", hf, C, tuple(ops), spinc_of,
                        tuple(tors), group, None, None, gf2.TensorDecoration(hf, 0, None))


@lru_cache(maxsize=None)
def model(name: str, max_order: int = 2) -> FloerPackage:
    """Built-in package; connected sums are tensor products of the summands."""
    summands = parse_manifold(name)
    if not summands:
        return _prime_model("S3", max_order)
    primes = [_prime_model(s, max_order) for s in summands]
    counts: dict[str, int] = {}
    for pk in primes:
        for n in pk.classes:
            counts[n] = counts.get(n, 0) + 1
    seen: dict[str, int] = {}
    renamed = []
    for pk in primes:
        mapping = []
        for n, f in pk.h1:
            if counts[n] > 1:
                seen[n] = seen.get(n, 0) + 1
                mapping.append((n, f"{n}{seen[n]}"))
            else:
                mapping.append((n, n))
        ren = dict(mapping)
        renamed.append(FloerPackage(pk.name, pk.hf, pk.d1_star,
                                    tuple((ren[n], f) for n, f in pk.h1), pk.spinc_of,
                                    tuple((ren[n], t) for n, t in pk.torsion), pk.h1_group,
                                    pk.spinc, pk.chain, pk.decoration))
    out = renamed[0]
    for pk in renamed[1:]:
        out = tensor_packages(out, pk)
    canonical = "#".join(summands)
    out = FloerPackage(canonical, out.hf, out.d1_star, out.h1, out.spinc_of, out.torsion,
                       out.h1_group, out.spinc, out.chain, out.decoration)
    out.check()
    return out
