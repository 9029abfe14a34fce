"""Command-line interface: hf, eval, audit, validate."""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import audits
from . import diagram as dg
from . import floer, gf2
from .graphcob import compile as compile_trace
from .graphcob import evaluate_trace, parse_trace
from .moves import eval_program, is_product, parse_program, spinc_blocks
from .gf2 import strip_comment
from .textio import ParseError, parse_diagram

__all__ = ["RunConfig", "main", "fixture_dir", "resolve_manifold", "cmd_hf", "cmd_eval",
           "cmd_audit", "cmd_validate"]

FIXTURE_ENV = "HFGRAPH_FIXTURES"


@dataclass(frozen=True)
class RunConfig:
    command: str
    inputs: tuple[str, ...]
    fmt: str = "text"
    max_order: int = 2
    seed: int = 0
    spinc: bool = False
    manifolds: tuple[str, ...] = ()

    def __post_init__(self):
        if self.max_order < 0:
            raise ValueError("--max-order must be nonnegative")
        if self.fmt not in ("text", "tree"):
            raise ValueError("--format must be text or tree")


def fixture_dir() -> Path:
    env = os.environ.get(FIXTURE_ENV)
    return Path(env) if env else floer.FIXTURE_DIR


def _find(path: str) -> Path:
    p = Path(path)
    if p.exists():
        return p
    for cand in (fixture_dir() / path, fixture_dir() / f"{path}.hd"):
        if cand.exists():
            return cand
    raise FileNotFoundError(f"no such file or fixture: {path}")


def _kind(path: Path, text: str) -> str:
    ext = path.suffix.lower()
    if ext == ".hd":
        return "diagram"
    if ext in (".tr", ".trace"):
        return "trace"
    if ext in (".mp", ".prog"):
        return "program"
    for raw in text.splitlines():
        line = strip_comment(raw)
        if not line:
            continue
        key = line.split()[0].lower()
        if key in ("genus", "alpha", "beta", "point", "region", "basepoint"):
            return "diagram"
        if key in ("start", "end"):
            return "trace"
        if key in ("points", "manifold", "star"):
            return "program"
    raise ValueError(f"cannot tell what kind of file {path} is")


def resolve_manifold(spec: str | None, max_order: int = 2):
    """A model name, or a diagram file (path or fixture name)."""
    if spec is None:
        return None
    try:
        return floer.model(spec, max_order)
    except ValueError:
        pass
    d = parse_diagram(_find(spec).read_text())
    return floer.package(d, max_order, Path(spec).stem)


# -- rendering ------------------------------------------------------------------------

def _matrix(f: gf2.Gf2Map) -> list[str]:
    return gf2.format_map(f).splitlines()


def _render_text(obj, indent: int = 0) -> list[str]:
    pad = "  " * indent
    out = []
    for k, v in obj.items():
        if isinstance(v, dict):
            out.append(f"{pad}{k}:")
            out += _render_text(v, indent + 1)
        elif isinstance(v, list):
            out.append(f"{pad}{k}:")
            out += [f"{pad}  {x}" for x in v]
        else:
            out.append(f"{pad}{k}: {v}")
    return out


def _emit(report: dict, fmt: str, out) -> None:
    if fmt == "tree":
        out.write(json.dumps(report, indent=2, ensure_ascii=False) + "\n")
    else:
        out.write("\n".join(_render_text(report)) + "\n")


# -- commands ----------------------------------------------------------------------------

def cmd_hf(cfg: RunConfig, out) -> int:
    path = _find(cfg.inputs[0])
    d = parse_diagram(path.read_text())
    rep = dg.validate(d)
    report: dict = {"file": path.name, "genus": d.genus,
                    "basepoints": len(d.basepoints)}
    if not rep:
        report["valid"] = f"no ({rep.error})"
        _emit(report, cfg.fmt, out)
        return 1
    gens = dg.generators(d)
    report["generators"] = [g.name for g in gens]
    cert = dg.admissibility_certificate(d)
    if cert is not None:
        report["admissible"] = "no"
        regions = [r.name for r in d.structure.regions]
        report["periodic domain"] = " ".join(f"{n}:{c}" for n, c in zip(regions, cert))
        report["refused"] = "differential not computed on an inadmissible diagram"
        _emit(report, cfg.fmt, out)
        return 1
    report["admissible"] = "yes"
    pkg = floer.package(d, cfg.max_order, path.stem)
    part = pkg.spinc
    report["H1"] = part.h1_text
    report["rank"] = pkg.rank
    by_class = pkg.spinc_classes()
    report["spinc classes occupied"] = len(by_class)
    report["rank per spinc"] = {c: len(v) for c, v in sorted(by_class.items())}
    if cfg.spinc:
        report["generator classes"] = {g.name: part.class_of(g) for g in gens}
    chain = pkg.chain
    report["d0"] = _matrix(chain.d0)
    if chain.d1 is not None:
        report["d1"] = _matrix(chain.d1)
        report["(d1)*"] = _matrix(pkg.C)
    report["homology basis"] = list(pkg.hf.labels)
    if pkg.h1:
        report["loop actions"] = {n: _matrix(f) for n, f in pkg.h1}
    _emit(report, cfg.fmt, out)
    return 0


def _load_program_or_trace(path: Path, manifold):
    text = path.read_text()
    kind = _kind(path, text)
    if kind == "trace":
        t = parse_trace(text)
        return "trace", t
    if kind == "program":
        return "program", parse_program(text, manifold)
    raise ValueError(f"{path} is a diagram, not a program or trace")


def cmd_eval(cfg: RunConfig, out) -> int:
    path = _find(cfg.inputs[0])
    man = resolve_manifold(cfg.manifolds[0], cfg.max_order) if cfg.manifolds else None
    kind, obj = _load_program_or_trace(path, man)
    if kind == "trace":
        f = evaluate_trace(obj, man)
        prog = compile_trace(obj, man, allow_isolated=True)
    else:
        prog = obj
        f = eval_program(prog)
    report: dict = {"file": path.name, "source": prog.start.describe(),
                    "target": prog.end.describe(), "map": _matrix(f)}
    if cfg.spinc:
        if not is_product(prog):
            report["spinc"] = "not a product program"
        else:
            blocks = spinc_blocks(prog)
            off = [c for c, b in blocks if c[0] != c[1] and not b.is_zero()]
            report["spinc"] = {"off-diagonal nonzero blocks": len(off)}
            report["spinc"].update({f"{so} <- {si}": _matrix(b)
                                    for (so, si), b in blocks if not b.is_zero()})
    _emit(report, cfg.fmt, out)
    return 0


def cmd_audit(cfg: RunConfig, out) -> int:
    suites = list(cfg.inputs) or list(audits.SUITES)
    ok = True
    report: dict = {}
    for name in suites:
        mans = [resolve_manifold(m, cfg.max_order) for m in cfg.manifolds] or None
        checks = audits.run_suite(name, mans, seed=cfg.seed, fixture_dir=fixture_dir())
        good = sum(c.ok for c in checks)
        ok = ok and good == len(checks)
        report[name] = {"passed": f"{good}/{len(checks)}", "checks": [c.line() for c in checks]}
    report["result"] = "PASS" if ok else "FAIL"
    _emit(report, cfg.fmt, out)
    return 0 if ok else 1


def cmd_validate(cfg: RunConfig, out) -> int:
    ok = True
    report: dict = {}
    for name in cfg.inputs:
        path = _find(name)
        text = path.read_text()
        try:
            kind = _kind(path, text)
            if kind == "diagram":
                rep = dg.validate(parse_diagram(text))
                msg = "ok" if rep else f"invalid: {rep.error}"
                ok = ok and bool(rep)
            else:
                man = resolve_manifold(cfg.manifolds[0], cfg.max_order) if cfg.manifolds else None
                _, obj = _load_program_or_trace(path, man)
                if kind == "trace":
                    compile_trace(obj, man, allow_isolated=True)
                else:
                    eval_program(obj)
                msg = "ok"
        except ValueError as exc:
            msg = f"invalid: {exc}"
            ok = False
        report[path.name] = msg
    _emit(report, cfg.fmt, out)
    return 0 if ok else 1


COMMANDS = {"hf": cmd_hf, "eval": cmd_eval, "audit": cmd_audit, "validate": cmd_validate}


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hfgraph", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-order", type=int, default=2, help="highest n_z order for d_i")
    common.add_argument("--seed", type=int, default=0, help="seed for random audits")
    common.add_argument("--format", choices=("text", "tree"), default="text", dest="fmt")
    common.add_argument("--spinc", action="store_true", help="show Spin^c decomposition")
    common.add_argument("--manifold", action="append", default=[],
                        help="model name or diagram file (repeatable for audit)")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("hf", parents=[common], help="compute HF-hat of a diagram").add_argument("inputs", nargs=1)
    sub.add_parser("eval", parents=[common], help="evaluate a program or trace").add_argument("inputs", nargs=1)
    a = sub.add_parser("audit", parents=[common], help="run identity audit suites")
    a.add_argument("inputs", nargs="*", metavar="suite", help=", ".join(audits.SUITES))
    sub.add_parser("validate", parents=[common], help="check input files").add_argument("inputs", nargs="+")
    return ap


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    args = _parser().parse_args(argv)
    try:
        cfg = RunConfig(args.command, tuple(args.inputs), args.fmt, args.max_order,
                        args.seed, args.spinc, tuple(args.manifold))
        return COMMANDS[cfg.command](cfg, out)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
