"""Labeled GF(2) vector spaces and linear maps.

Vectors are sets of basis labels; internally elimination runs on Python
integers used as bit vectors (bit i is the i-th label of the space).
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

__all__ = [
    "strip_comment",
    "TENSOR", "THETA_PLUS", "THETA_MINUS", "LabeledSpace", "Gf2Map",
    "Homology", "make_space", "identity", "zero", "from_dict", "compose",
    "add", "tensor", "tensor_spaces", "block_assemble", "block_extract",
    "homology", "format_map", "parse_map", "relabel",
]

TENSOR = "⊗"
THETA_PLUS = "θ+"
THETA_MINUS = "θ-"


@dataclass(frozen=True)
class LabeledSpace:
    labels: tuple[str, ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        index = {lab: i for i, lab in enumerate(labels)}
        if len(index) != len(labels):
            dup = sorted({l for l in labels if labels.count(l) > 1})
            raise ValueError(f"duplicate label(s): {dup}")
        object.__setattr__(self, "_index", index)

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise ValueError(f"label {label!r} not in space") from None

    def __contains__(self, label) -> bool:
        return label in self._index

    def __len__(self) -> int:
        return len(self.labels)

    def to_bits(self, vec: Iterable[str]) -> int:
        bits = 0
        for lab in vec:
            bits ^= 1 << self.index(lab)
        return bits

    def from_bits(self, bits: int) -> frozenset:
        out = []
        i = 0
        while bits:
            if bits & 1:
                out.append(self.labels[i])
            bits >>= 1
            i += 1
        return frozenset(out)


def make_space(labels: Sequence[str]) -> LabeledSpace:
    return LabeledSpace(tuple(labels))


@dataclass(frozen=True)
class Gf2Map:
    """Linear map given by its columns (sets of codomain labels)."""

    domain: LabeledSpace
    codomain: LabeledSpace
    columns: tuple[frozenset, ...]

    def __post_init__(self):
        cols = tuple(frozenset(c) for c in self.columns)
        if len(cols) != self.domain.dim:
            raise ValueError("column count does not match domain dimension")
        for c in cols:
            for lab in c:
                if lab not in self.codomain:
                    raise ValueError(f"label {lab!r} not in codomain")
        object.__setattr__(self, "columns", cols)

    def column(self, label: str) -> frozenset:
        return self.columns[self.domain.index(label)]

    def __call__(self, vec: Iterable[str]) -> frozenset:
        out: set = set()
        for lab in vec:
            out ^= self.column(lab)
        return frozenset(out)

    def bit_columns(self) -> list[int]:
        return [self.codomain.to_bits(c) for c in self.columns]

    def is_zero(self) -> bool:
        return not any(self.columns)

    def entry(self, row: str, col: str) -> int:
        return int(row in self.column(col))

    def rows(self) -> list[list[int]]:
        """Dense 0/1 matrix, rows indexed by codomain labels."""
        return [[int(r in c) for c in self.columns] for r in self.codomain.labels]

    def __add__(self, other: "Gf2Map") -> "Gf2Map":
        return add(self, other)

    def __matmul__(self, other: "Gf2Map") -> "Gf2Map":
        return compose(self, other)

    def __str__(self) -> str:
        return format_map(self)


def _from_bits(domain: LabeledSpace, codomain: LabeledSpace, cols: Sequence[int]) -> Gf2Map:
    return Gf2Map(domain, codomain, tuple(codomain.from_bits(b) for b in cols))


def identity(space: LabeledSpace) -> Gf2Map:
    return Gf2Map(space, space, tuple(frozenset([l]) for l in space.labels))


def zero(domain: LabeledSpace, codomain: LabeledSpace | None = None) -> Gf2Map:
    codomain = domain if codomain is None else codomain
    return Gf2Map(domain, codomain, tuple(frozenset() for _ in domain.labels))


def from_dict(domain: LabeledSpace, codomain: LabeledSpace,
              images: Mapping[str, Iterable[str]]) -> Gf2Map:
    """Build a map from ``{label: image labels}``; missing labels map to 0."""
    for lab in images:
        domain.index(lab)
    cols = []
    for lab in domain.labels:
        col: set = set()
        for t in images.get(lab, ()):
            col ^= {t}
        cols.append(frozenset(col))
    return Gf2Map(domain, codomain, tuple(cols))


def compose(g: Gf2Map, f: Gf2Map) -> Gf2Map:
    """Return g ∘ f."""
    if f.codomain != g.domain:
        raise ValueError("shape mismatch in compose: codomain(f) != domain(g)")
    gb = g.bit_columns()
    cols = []
    for c in f.columns:
        acc = 0
        for lab in c:
            acc ^= gb[g.domain.index(lab)]
        cols.append(acc)
    return _from_bits(f.domain, g.codomain, cols)


def add(f: Gf2Map, g: Gf2Map) -> Gf2Map:
    if f.domain != g.domain or f.codomain != g.codomain:
        raise ValueError("shape mismatch in add")
    return Gf2Map(f.domain, f.codomain, tuple(a ^ b for a, b in zip(f.columns, g.columns)))


def _join(a: str, b: str) -> str:
    return f"{a}{TENSOR}{b}"


def tensor_spaces(a: LabeledSpace, b: LabeledSpace) -> LabeledSpace:
    # first factor varies slowest
    return LabeledSpace(tuple(_join(x, y) for x in a.labels for y in b.labels))


def tensor(f: Gf2Map, g: Gf2Map) -> Gf2Map:
    dom = tensor_spaces(f.domain, g.domain)
    cod = tensor_spaces(f.codomain, g.codomain)
    cols = []
    for cf in f.columns:
        for cg in g.columns:
            cols.append(frozenset(_join(x, y) for x in cf for y in cg))
    return Gf2Map(dom, cod, tuple(cols))


def relabel(f: Gf2Map, domain: Mapping[str, str] | None = None,
            codomain: Mapping[str, str] | None = None) -> Gf2Map:
    """Rename basis labels (missing keys keep their name)."""
    dm = domain or {}
    cm = codomain or {}
    dom = LabeledSpace(tuple(dm.get(l, l) for l in f.domain.labels))
    cod = LabeledSpace(tuple(cm.get(l, l) for l in f.codomain.labels))
    return Gf2Map(dom, cod, tuple(frozenset(cm.get(l, l) for l in c) for c in f.columns))


_THETAS = (THETA_PLUS, THETA_MINUS)


def _split_label(label: str, factor: int) -> tuple[str, str]:
    parts = label.split(TENSOR)
    if len(parts) < 2:
        raise ValueError(f"label {label!r} has no tensor factor")
    theta = parts[factor]
    if theta not in _THETAS:
        raise ValueError(f"label {label!r}: factor {factor} is not θ+/θ-")
    del parts[factor]
    return TENSOR.join(parts), theta


def _insert(base: str, theta: str, factor: int, nparts: int) -> str:
    parts = base.split(TENSOR) if base else []
    pos = factor if factor >= 0 else nparts + factor
    parts.insert(pos, theta)
    return TENSOR.join(parts)


def block_assemble(blocks: Sequence[Sequence[Gf2Map]], factor: int = -1) -> Gf2Map:
    """Assemble a 2x2 block map on ``A ⊗ V -> B ⊗ V``.

    ``blocks[i][j]`` maps the θ_j part of the domain to the θ_i part of the
    codomain (index 0 is θ+). ``factor`` is the position of the V factor
    among the tensor components of the assembled labels.
    """
    if len(blocks) != 2 or any(len(r) != 2 for r in blocks):
        raise ValueError("block_assemble needs a 2x2 grid")
    dom_base = blocks[0][0].domain
    cod_base = blocks[0][0].codomain
    for i in range(2):
        for j in range(2):
            if blocks[i][j].domain != dom_base or blocks[i][j].codomain != cod_base:
                raise ValueError("inconsistent block shapes")
    nd = len(dom_base.labels[0].split(TENSOR)) + 1 if dom_base.labels else 1
    nc = len(cod_base.labels[0].split(TENSOR)) + 1 if cod_base.labels else 1
    dom_labels = [_insert(a, t, factor, nd) for a in dom_base.labels for t in _THETAS]
    cod_labels = [_insert(b, t, factor, nc) for b in cod_base.labels for t in _THETAS]
    dom = LabeledSpace(tuple(dom_labels))
    cod = LabeledSpace(tuple(cod_labels))
    cols = []
    for a in dom_base.labels:
        for j, _t in enumerate(_THETAS):
            col = set()
            for i, ti in enumerate(_THETAS):
                for b in blocks[i][j].column(a):
                    col.add(_insert(b, ti, factor, nc))
            cols.append(frozenset(col))
    return Gf2Map(dom, cod, tuple(cols))


def block_extract(f: Gf2Map, row: int, col: int, factor: int = -1) -> Gf2Map:
    """Block of ``f`` from the θ_col part of the domain to the θ_row part."""
    t_row, t_col = _THETAS[row], _THETAS[col]
    dom_pairs = [_split_label(l, factor) for l in f.domain.labels]
    cod_pairs = [_split_label(l, factor) for l in f.codomain.labels]
    dom_base = [b for b, t in dom_pairs if t == t_col]
    cod_base = [b for b, t in cod_pairs if t == t_row]
    if len(dom_base) * 2 != len(dom_pairs) or len(cod_base) * 2 != len(cod_pairs):
        raise ValueError("map is not split by a V factor")
    dom = LabeledSpace(tuple(dom_base))
    cod = LabeledSpace(tuple(cod_base))
    cols = []
    for lab, (b, t) in zip(f.domain.labels, dom_pairs):
        if t != t_col:
            continue
        img = set()
        for r in f.column(lab):
            rb, rt = _split_label(r, factor)
            if rt == t_row:
                img.add(rb)
        cols.append(frozenset(img))
    return Gf2Map(dom, cod, tuple(cols))


def _low(bits: int) -> int:
    return (bits & -bits).bit_length() - 1


@dataclass(frozen=True)
class Homology:
    """ker d / im d with a chosen representative basis.

    ``section`` sends each homology basis element to its representative
    cycle; ``projection`` is a linear map on the whole chain space that
    restricts to the quotient map on cycles.
    """

    chain: LabeledSpace
    space: LabeledSpace
    section: Gf2Map
    projection: Gf2Map
    differential: Gf2Map

    @property
    def rank(self) -> int:
        return self.space.dim

    def transport(self, f: Gf2Map, check: bool = True) -> Gf2Map:
        """Induced map on homology of a chain map f: C -> C."""
        if check:
            d = self.differential
            if compose(f, d) != compose(d, f):
                raise ValueError("map does not commute with the differential")
        return compose(self.projection, compose(f, self.section))

    def transport_between(self, f: Gf2Map, target: "Homology") -> Gf2Map:
        return compose(target.projection, compose(f, self.section))


def homology(d: Gf2Map, names: Mapping[int, str] | None = None) -> Homology:
    if d.domain != d.codomain:
        raise ValueError("differential must be an endomorphism")
    if not compose(d, d).is_zero():
        raise ValueError("d∘d != 0")
    space = d.domain
    n = space.dim
    cols = d.bit_columns()
    pivots: dict[int, int] = {}
    kernel = []
    for j in range(n):
        col, combo = cols[j], 1 << j
        while col:
            p = _low(col)
            if p not in pivots:
                break
            pc, pcombo = pivots[p]
            col ^= pc
            combo ^= pcombo
        if col:
            pivots[_low(col)] = (col, combo)
        else:
            kernel.append(combo)
    basis: dict[int, tuple[int, int]] = {}  # pivot -> (vector, rep index or -1)
    for p, (vec, _c) in pivots.items():
        basis[p] = (vec, -1)

    def reduce(v: int) -> int:
        while v:
            p = _low(v)
            if p not in basis:
                return v
            v ^= basis[p][0]
        return 0

    reps = []
    for z in kernel:
        r = reduce(z)
        if r:
            basis[_low(r)] = (r, len(reps))
            reps.append(r)
    for i in range(n):
        if i not in basis:
            basis[i] = (1 << i, -1)
    labels = []
    for k, r in enumerate(reps):
        if names and k in names:
            labels.append(names[k])
        else:
            labels.append("+".join(space.labels[i] for i in range(n) if r >> i & 1))
    hspace = LabeledSpace(tuple(labels))
    section = _from_bits(hspace, space, reps)
    proj_cols = []
    for i in range(n):
        v, acc = 1 << i, 0
        while v:
            vec, k = basis[_low(v)]
            v ^= vec
            if k >= 0:
                acc ^= 1 << k
        proj_cols.append(acc)
    projection = _from_bits(space, hspace, proj_cols)
    return Homology(space, hspace, section, projection, d)


def strip_comment(line: str) -> str:
    """Drop a comment: a ``#`` standing alone as a word, and the rest of the line."""
    return _COMMENT.sub("", line).strip()


_COMMENT = re.compile(r"(^|\s)#(?=\s|$).*$")


def format_map(f: Gf2Map) -> str:
    lines = []
    for lab, col in zip(f.domain.labels, f.columns):
        if col:
            img = ", ".join(l for l in f.codomain.labels if l in col)
            lines.append(f"{lab} -> {{{img}}}")
        else:
            lines.append(f"{lab} -> 0")
    return "\n".join(lines)


def parse_map(text: str, domain: LabeledSpace, codomain: LabeledSpace) -> Gf2Map:
    images = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = strip_comment(raw)
        if not line:
            continue
        if "->" not in line:
            raise ValueError(f"line {lineno}: expected 'label -> {{...}}'")
        lab, rhs = (s.strip() for s in line.split("->", 1))
        if rhs == "0":
            images[lab] = []
        elif rhs.startswith("{") and rhs.endswith("}"):
            images[lab] = [s.strip() for s in rhs[1:-1].split(",") if s.strip()]
        else:
            raise ValueError(f"line {lineno}: bad image {rhs!r}")
    return from_dict(domain, codomain, images)


@dataclass(frozen=True)
class TensorDecoration:
    """Identification of a space with ``base ⊗ V^{⊗ factor_count}``."""

    base: LabeledSpace
    factor_count: int
    starred_factor: int | None = None

    def __post_init__(self):
        if self.factor_count < 0:
            raise ValueError("factor_count must be nonnegative")
        if self.starred_factor is not None and not 0 <= self.starred_factor <= self.factor_count:
            raise ValueError("starred factor out of range")

    @property
    def space(self) -> LabeledSpace:
        labels = list(self.base.labels)
        for _ in range(self.factor_count):
            labels = [_join(l, t) for l in labels for t in _THETAS]
        return LabeledSpace(tuple(labels))


__all__.append("TensorDecoration")
