"""Command-line front end: ``circpoly <command> ...``."""

from __future__ import annotations

import argparse
import hashlib
import math
import sys
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import oracle as orc
from .circumscribe import TooFewSelected, circumscribe, verify_circumscribing
from .frame import InvariantBreach
from .geom import GeometryError
from .instance import (GENERATORS, BadParams, ParseError, SegmentSet, ValidationReport, parse_instance,
                       parse_polygon, validate_general_position, write_instance, write_polygon, generate)
from .rays import (EscapeOrder, escape_polygon, escape_report, ray_extensible, rays_to_escape_order)
from .select import select_subset
from .svg import render_svg

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_BREACH = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class RunReport:
    command: str
    digest: str
    verdicts: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    def text(self, with_timings: bool = False) -> str:
        lines = [f"# command={self.command}", f"# instance={self.digest}"]
        lines += [f"# verdict={v}" for v in self.verdicts]
        lines += [f"# {k}={v}" for k, v in sorted(self.stats.items())]
        if with_timings:
            lines += [f"# time.{k}={v:.3f}s" for k, v in sorted(self.timings.items())]
        return "\n".join(lines)


def digest(s: SegmentSet) -> str:
    return hashlib.sha256(write_instance(s).encode()).hexdigest()[:16]


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as err:
        raise UsageError(f"cannot read {path}: {err.strerror}") from err


def _load(path: str) -> SegmentSet:
    return parse_instance(_read(path))


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_svg(path: Optional[str], s: SegmentSet, **overlays) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(render_svg(s, **overlays))


def _budget(args) -> orc.SearchBudget:
    nodes = args.budget if args.budget is not None else (10 ** 9 if args.slow else 10 ** 8)
    seconds = math.inf if args.slow else 600.0
    return orc.SearchBudget(nodes=nodes, seconds=seconds)


def _cap(args, n: int, cap: int) -> int:
    if args.slow:
        return n
    if n > cap:
        raise UsageError(f"instance has {n} segments, the default cap is {cap}; pass --slow to lift it")
    return cap


def _rays(s: SegmentSet, e: EscapeOrder) -> list:
    return [(s.point(e.b_ref(i)), e.extension_end[i]) for i in e.order]


def _order_arg(text: str) -> EscapeOrder:
    try:
        return EscapeOrder.parse(text)
    except ValueError as err:
        raise UsageError(str(err)) from err


# ------------------------------------------------------------------ commands

def cmd_validate(args, rep: RunReport) -> int:
    s = parse_instance(_read(args.file), strict_disjoint=False)
    rep.digest = digest(s)
    v: ValidationReport = validate_general_position(s)
    rep.stats["n"] = len(s)
    if v.ok:
        _emit("OK\n", args.output)
        rep.verdicts.append("OK")
        return EXIT_OK
    _emit(str(v) + "\n", args.output)
    rep.verdicts.append("INVALID")
    return EXIT_NO


def cmd_generate(args, rep: RunReport) -> int:
    s = generate(args.kind, n=args.n, k=args.k, seed=args.seed)
    rep.digest = digest(s)
    rep.stats["n"] = len(s)
    params = " ".join(f"{k}={v}" for k, v in (("n", args.n), ("k", args.k)) if v is not None)
    header = f"circpoly generate {args.kind} {params} seed={args.seed}".replace("  ", " ")
    _emit(write_instance(s, header=header), args.output)
    _write_svg(args.svg, s)
    return EXIT_OK


def cmd_select(args, rep: RunReport) -> int:
    s = _load(args.file)
    rep.digest = digest(s)
    sel = select_subset(s)
    rep.stats.update({"n": len(s), "selected": len(sel.subset), "M": sel.M})
    _emit(sel.dump() + "\n", args.output)
    return EXIT_OK


def cmd_circumscribe(args, rep: RunReport) -> int:
    s = _load(args.file)
    rep.digest = digest(s)
    res = circumscribe(s, check=args.check)
    v = verify_circumscribing(res.polygon, s, res.subset)
    if not v.ok:
        raise InvariantBreach(f"pipeline polygon failed verification: {v}")
    n, s1, s2 = len(s), len(res.selected), len(res.subset)
    rep.stats.update({"n": n, "selected": s1, "circumscribed": s2})
    lines = [write_polygon(res.polygon, s1, n).rstrip("\n"),
             f"# bound 16*selected^2 >= n: {16 * s1 * s1} >= {n} {'ok' if 16 * s1 * s1 >= n else 'FAIL'}",
             f"# bound circumscribed >= ceil(selected/4): {s2} >= {-(-s1 // 4)} {'ok' if 4 * s2 >= s1 else 'FAIL'}"]
    _emit("\n".join(lines) + "\n", args.output)
    _write_svg(args.svg, s, polygons=[res.polygon])
    return EXIT_OK


def cmd_extend_rays(args, rep: RunReport) -> int:
    s = _load(args.file)
    rep.digest = digest(s)
    rc = ray_extensible(s)
    if rc is None:
        rep.verdicts.append("NONE")
        _emit("NONE\n", args.output)
        return EXIT_NO
    rep.verdicts.append("YES")
    _emit(rc.text() + "\n", args.output)
    if args.svg:
        _write_svg(args.svg, s, rays=_rays(s, rays_to_escape_order(s, rc)))
    return EXIT_OK


class _Exhausted(Exception):
    pass


def _find_order(s: SegmentSet, args, rep: RunReport) -> Optional[EscapeOrder]:
    rc = ray_extensible(s)
    if rc is not None:
        rep.stats["via"] = "rays"
        return rays_to_escape_order(s, rc)
    r = orc.oracle_escape_route(s, budget=_budget(args), cap=_cap(args, len(s), orc.ESCAPE_CAP))
    rep.stats["via"] = "search"
    rep.stats["nodes"] = r.nodes
    if r.verdict is orc.Verdict.EXHAUSTED:
        raise _Exhausted(r.nodes)
    return r.witness


def cmd_escape(args, rep: RunReport) -> int:
    s = _load(args.file)
    rep.digest = digest(s)
    if args.action == "check":
        if not args.order:
            raise UsageError("escape check needs an order such as '0:b 2:a 1:b'")
        e = _order_arg(args.order)
        r = escape_report(s, e.order, e.tail)
        if r.ok:
            _emit("OK " + r.order.text() + "\n", args.output)
            return EXIT_OK
        _emit(f"FAIL at segment {r.failed}\n", args.output)
        return EXIT_NO
    if args.order:
        e = _order_arg(args.order)
        r = escape_report(s, e.order, e.tail)
        if not r.ok:
            _emit(f"FAIL at segment {r.failed}\n", args.output)
            return EXIT_NO
        e = r.order
    else:
        e = _find_order(s, args, rep)
    if e is None:
        rep.verdicts.append("NO")
        _emit("NO\n", args.output)
        return EXIT_NO
    checked = escape_report(s, e.order, e.tail)
    if not checked.ok:
        raise InvariantBreach("escape witness failed re-verification")
    e = checked.order
    rays = _rays(s, e)
    if args.action == "find":
        rep.verdicts.append("YES")
        _emit(e.text() + "\n", args.output)
        _write_svg(args.svg, s, rays=rays)
        return EXIT_OK
    poly = escape_polygon(s, e, check=args.check)
    v = verify_circumscribing(poly, s, s.ids)
    if not v.ok:
        raise InvariantBreach(f"escape polygon failed verification: {v}")
    _emit(write_polygon(poly, len(s), len(s)), args.output)
    _write_svg(args.svg, s, polygons=[poly], rays=rays)
    return EXIT_OK


def cmd_oracle(args, rep: RunReport) -> int:
    s = _load(args.file)
    rep.digest = digest(s)
    budget = _budget(args)
    cap = _cap(args, len(s), orc.CIRC_CAP if args.kind in ("circ", "poly") else orc.ESCAPE_CAP)
    if args.kind in ("circ", "poly"):
        fn = orc.oracle_circumscribing if args.kind == "circ" else orc.oracle_polygonization
        r = fn(s, budget=budget, cap=cap)
        rep.stats["nodes"] = r.nodes
        rep.verdicts.append(r.verdict.value)
        if r.verdict is orc.Verdict.YES:
            _write_svg(args.svg, s, polygons=[r.witness])
        _emit(r.text() + "\n", args.output)
    elif args.kind == "escape":
        r = orc.oracle_escape_route(s, budget=budget, cap=cap)
        rep.stats["nodes"] = r.nodes
        rep.verdicts.append(r.verdict.value)
        _emit(r.text() + "\n", args.output)
    else:
        m = orc.oracle_max_escape_subset(s, budget=budget, cap=cap)
        rep.stats.update({"nodes": m.nodes, "size": m.size})
        rep.verdicts.append(m.verdict.value)
        if m.verdict is orc.Verdict.EXHAUSTED:
            _emit(f"EXHAUSTED {m.nodes}\n", args.output)
        else:
            body = m.witness.text() if m.witness is not None else ""
            _emit(f"{m.size} {body}".rstrip() + "\n", args.output)
        return EXIT_BREACH if m.verdict is orc.Verdict.EXHAUSTED else EXIT_OK
    return {orc.Verdict.YES: EXIT_OK, orc.Verdict.NO: EXIT_NO}.get(r.verdict, EXIT_BREACH)


def cmd_render(args, rep: RunReport) -> int:
    s = _load(args.file)
    rep.digest = digest(s)
    polys = []
    if args.polygon:
        p = parse_polygon(_read(args.polygon))
        v = verify_circumscribing(p, s, p.subset)
        if not v.ok:
            print(str(v), file=sys.stderr)
            return EXIT_NO
        polys.append(p)
    rays = []
    if args.order:
        e = _order_arg(args.order)
        r = escape_report(s, e.order, e.tail)
        if not r.ok:
            print(f"FAIL at segment {r.failed}", file=sys.stderr)
            return EXIT_NO
        rays = _rays(s, r.order)
    _emit(render_svg(s, polygons=polys, rays=rays), args.output or args.svg)
    return EXIT_OK


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", metavar="FILE", help="write the main output here")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--svg", metavar="FILE", help="also write an SVG picture")
    common.add_argument("--check", action="store_true", help="run the instrumented verifiers")
    common.add_argument("--slow", action="store_true", help="lift oracle size caps and time limits")
    common.add_argument("--budget", type=int, metavar="NODES", help="oracle node budget")
    common.add_argument("--report", action="store_true", help="print a run report to stderr")

    p = argparse.ArgumentParser(prog="circpoly", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    c = sub.add_parser("validate", parents=[common])
    c.add_argument("file")
    c = sub.add_parser("generate", parents=[common])
    c.add_argument("kind", choices=GENERATORS)
    c.add_argument("--n", type=int)
    c.add_argument("--k", type=int)
    for name in ("select", "circumscribe", "extend-rays"):
        sub.add_parser(name, parents=[common]).add_argument("file")
    c = sub.add_parser("escape", parents=[common])
    c.add_argument("action", choices=("check", "find", "polygon"))
    c.add_argument("file")
    c.add_argument("order", nargs="?", help="escape order, e.g. '0:b 2:a 1:b'")
    c = sub.add_parser("oracle", parents=[common])
    c.add_argument("kind", choices=("circ", "poly", "escape", "max-escape"))
    c.add_argument("file")
    c = sub.add_parser("render", parents=[common])
    c.add_argument("file")
    c.add_argument("--polygon", metavar="FILE")
    c.add_argument("--order", help="escape order whose extensions are drawn dashed")
    return p


COMMANDS = {
    "validate": cmd_validate, "generate": cmd_generate, "select": cmd_select,
    "circumscribe": cmd_circumscribe, "extend-rays": cmd_extend_rays, "escape": cmd_escape,
    "oracle": cmd_oracle, "render": cmd_render,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_USAGE if err.code else EXIT_OK
    rep = RunReport(args.command, "-")
    t0 = time.perf_counter()
    try:
        code = COMMANDS[args.command](args, rep)
    except UsageError as err:
        print(f"circpoly: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, BadParams, TooFewSelected, GeometryError, ValueError) as err:
        # InvariantBreach is a RuntimeError, so it is not caught here
        print(f"circpoly: {err}", file=sys.stderr)
        return EXIT_NO
    except _Exhausted as err:
        print(f"EXHAUSTED {err.args[0]}")
        return EXIT_BREACH
    except InvariantBreach as err:
        print(f"circpoly: invariant breach: {err}", file=sys.stderr)
        return EXIT_BREACH
    rep.timings["total"] = time.perf_counter() - t0
    if args.report:
        print(rep.text(with_timings=True), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
