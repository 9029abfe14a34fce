"""Line-oriented text formats for diagrams, move programs and traces."""
from __future__ import annotations

from pathlib import Path

from .diagram import HeegaardDiagram, Point
from .gf2 import strip_comment

__all__ = ["ParseError", "parse_diagram", "format_diagram", "load_diagram"]


class ParseError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = strip_comment(raw)
        if line:
            yield lineno, line


def _named(lineno: int, rest: str) -> tuple[str, list[str]]:
    if ":" not in rest:
        raise ParseError(lineno, "expected 'name: items'")
    name, items = rest.split(":", 1)
    name = name.strip()
    if not name:
        raise ParseError(lineno, "missing name")
    return name, items.split()


def parse_diagram(text: str) -> HeegaardDiagram:
    genus = None
    alphas, betas, points, regions, bps, loops = [], [], [], [], [], []
    for lineno, line in _lines(text):
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        if key == "genus":
            try:
                genus = int(rest)
            except ValueError:
                raise ParseError(lineno, f"bad genus {rest!r}") from None
        elif key in ("alpha", "beta"):
            name, items = _named(lineno, rest)
            (alphas if key == "alpha" else betas).append((name, tuple(items)))
        elif key == "point":
            parts = rest.split()
            if len(parts) != 4 or parts[3] not in ("+", "-"):
                raise ParseError(lineno, "expected 'point NAME ALPHA BETA +|-'")
            points.append(Point(parts[0], parts[1], parts[2], 1 if parts[3] == "+" else -1))
        elif key == "region":
            name, items = _named(lineno, rest)
            regions.append((name, tuple(items)))
        elif key == "basepoint":
            name, items = _named(lineno, rest)
            if len(items) != 1:
                raise ParseError(lineno, "basepoint needs exactly one region or corner")
            bps.append((name, items[0]))
        elif key == "loop":
            name, items = _named(lineno, rest)
            loops.append((name, tuple(items)))
        else:
            raise ParseError(lineno, f"unknown keyword {key!r}")
    if genus is None:
        raise ParseError(0, "missing 'genus' line")
    return HeegaardDiagram(genus, tuple(alphas), tuple(betas), tuple(points),
                           tuple(regions), tuple(bps), tuple(loops))


def format_diagram(d: HeegaardDiagram) -> str:
    out = [f"genus {d.genus}"]
    for name, order in d.alphas:
        out.append(f"alpha {name}: {' '.join(order)}")
    for name, order in d.betas:
        out.append(f"beta {name}: {' '.join(order)}")
    for p in d.points:
        out.append(f"point {p.name} {p.alpha} {p.beta} {'+' if p.sign > 0 else '-'}")
    for name, corners in d.regions:
        out.append(f"region {name}: {' '.join(corners)}")
    for name, ref in d.basepoints:
        out.append(f"basepoint {name}: {ref}")
    for name, word in d.loops:
        out.append(f"loop {name}: {' '.join(word)}")
    return "\n".join(out) + "\n"


def load_diagram(path: str | Path) -> HeegaardDiagram:
    return parse_diagram(Path(path).read_text())
