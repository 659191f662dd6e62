"""Weakly simple frames over segment endpoints and their elementary operations.

A frame is stored as a ccw cycle of :class:`VertexRef`.  A vertex may occur
twice; incidences are always resolved by cycle position, never by looking a
point up by coordinates.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Optional, Sequence

from .geom import (
    AllCollinear, AmbiguousHit, Intersection, Point, PreconditionViolated,
    carc, classify as seg_classify, convex_hull, crosses_properly, is_simple_polygon,
    locate, midpoint, on_open_segment, orient, ray_param, point_at, signed_area2,
)
from .instance import SegmentSet, ValidationReport, VertexRef


class InvariantBreach(RuntimeError):
    """An instrumented check failed; this is a bug, never bad input."""

    def __init__(self, msg: str, bundle: Optional[dict] = None):
        super().__init__(msg)
        self.bundle = bundle or {}


class F5Violated(InvariantBreach):
    pass


class RayHitsSegment(PreconditionViolated):
    pass


class Angle(enum.Enum):
    CONVEX = "convex"
    REFLEX = "reflex"


class Safety(enum.Enum):
    SAFE = "safe"
    UNSAFE = "unsafe"
    NA = "n/a"


class Arc(enum.Enum):
    LOWER = "lower"
    UPPER = "upper"


class VertexClass(NamedTuple):
    multiplicity: int
    angle: Angle
    safety: Safety


@dataclass
class OpRecord:
    op: str
    args: tuple
    before: tuple
    after: tuple
    inst: SegmentSet


@dataclass
class LineContext:
    """Vertical lines and protected vertices used by the F6/F7/R2/R3 checks."""

    separators: list = field(default_factory=list)  # L_1..L_{r-1}
    stabbers: list = field(default_factory=list)  # l_1..l_r
    protected: set = field(default_factory=set)  # a_t(i) for the chosen groups


class Frame:
    def __init__(self, inst: SegmentSet, cycle: Iterable[VertexRef], rho: Optional[dict] = None):
        self.inst = inst
        self.cycle: list[VertexRef] = list(cycle)
        self.rho: dict = dict(rho or {})
        self.log: list[OpRecord] = []

    def copy(self) -> "Frame":
        f = Frame(self.inst, self.cycle, self.rho)
        f.log = list(self.log)
        return f

    def __len__(self) -> int:
        return len(self.cycle)

    # -- geometry lookups

    def pts(self) -> list[Point]:
        return [self.inst.point(r) for r in self.cycle]

    def p(self, i: int) -> Point:
        return self.inst.point(self.cycle[i % len(self.cycle)])

    def positions(self, ref: VertexRef) -> list[int]:
        return [i for i, r in enumerate(self.cycle) if r == ref]

    def multiplicity(self, ref: VertexRef) -> int:
        return self.cycle.count(ref)

    def vertex_set(self) -> set:
        return set(self.cycle)

    def edge_is_segment(self, i: int) -> bool:
        u = self.cycle[i % len(self.cycle)]
        v = self.cycle[(i + 1) % len(self.cycle)]
        return u.seg == v.seg and u.end != v.end

    def area2(self) -> Fraction:
        return signed_area2(self.pts())

    # -- classification

    def angle_at(self, i: int) -> Angle:
        k = len(self.cycle)
        prev, v, nxt = self.p(i - 1), self.p(i), self.p(i + 1)
        o = orient(prev, v, nxt)
        if o > 0:
            return Angle.CONVEX
        if o < 0:
            return Angle.REFLEX
        # straight angle is convex; a spike is a full turn when it points
        # into the interior wedge at its base and a zero angle otherwise
        if prev == nxt and k > 2:
            # walk down a possibly longer antenna to where its two sides part
            r = 2
            while 2 * r <= k and self.p(i - r) == self.p(i + r):
                r += 1
            if 2 * r > k:
                return Angle.REFLEX
            u, inner = self.p(i - r + 1), self.p(i - r + 2)
            w, z = self.p(i - r), self.p(i + r)
            d = (inner.x - u.x, inner.y - u.y)
            inside = _strictly_between((z.x - u.x, z.y - u.y), d, (w.x - u.x, w.y - u.y))
            return Angle.REFLEX if inside else Angle.CONVEX
        dot = (v.x - prev.x) * (nxt.x - v.x) + (v.y - prev.y) * (nxt.y - v.y)
        return Angle.CONVEX if dot > 0 else Angle.REFLEX

    def classify(self, i: int, mult: Optional[Counter] = None) -> VertexClass:
        ref = self.cycle[i]
        m = mult[ref] if mult is not None else self.multiplicity(ref)
        ang = self.angle_at(i)
        if ang is Angle.CONVEX:
            return VertexClass(m, ang, Safety.NA)
        v, nxt, prev = self.p(i), self.p(i + 1), self.p(i - 1)
        w = self.inst.point(ref.partner())
        safe = orient(v, nxt, w) > 0 and orient(v, w, prev) > 0
        return VertexClass(m, ang, Safety.SAFE if safe else Safety.UNSAFE)

    def classes(self) -> list[VertexClass]:
        mult = Counter(self.cycle)
        return [self.classify(i, mult) for i in range(len(self.cycle))]

    # -- arcs

    def extreme_positions(self) -> tuple[int, int]:
        pts = self.pts()
        il = min(range(len(pts)), key=lambda i: (pts[i].x, i))
        ir = max(range(len(pts)), key=lambda i: (pts[i].x, -i))
        return il, ir

    def arc_tags(self) -> list[Arc]:
        k = len(self.cycle)
        il, ir = self.extreme_positions()
        tags = [Arc.UPPER] * k
        i = il
        while i != ir:
            tags[i] = Arc.LOWER
            i = (i + 1) % k
        return tags

    def arc_of(self, i: int) -> Arc:
        return self.arc_tags()[i]

    def rho_of(self, ref: VertexRef) -> int:
        if ref in self.rho:
            return self.rho[ref]
        pos = self.positions(ref)
        if not pos:
            raise PreconditionViolated(f"{ref} is not a frame vertex")
        return 1 if self.arc_of(pos[0]) is Arc.LOWER else -1

    def dump(self) -> str:
        cls = self.classes()
        tags = self.arc_tags()
        out = []
        for r, c, t in zip(self.cycle, cls, tags):
            bits = [str(r), str(c.multiplicity), c.angle.value]
            if c.safety is not Safety.NA:
                bits.append(c.safety.value)
            bits.append(t.value)
            out.append(":".join(bits))
        return " ".join(out)

    # -- bookkeeping

    def _record(self, op: str, args: tuple, before: list) -> None:
        self.log.append(OpRecord(op, args, tuple(before), tuple(self.cycle), self.inst))

    def reflected(self, fn, reverse: bool = True) -> "Frame":
        """Same frame under an orientation-reversing coordinate map."""
        inst = self.inst.transformed(fn)
        f = Frame(inst, reversed(self.cycle) if reverse else self.cycle, self.rho)
        f.log = list(self.log)
        f.log.append(OpRecord("reflect", (), tuple(self.cycle), tuple(f.cycle), inst))
        return f


# ------------------------------------------------------------------ helpers

def _strictly_between(a: tuple, d: tuple, b: tuple) -> bool:
    """Direction d lies strictly inside the ccw sweep from a to b."""
    def cr(u, v):
        return u[0] * v[1] - u[1] * v[0]

    def dot(u, v):
        return u[0] * v[0] + u[1] * v[1]

    ab = cr(a, b)
    if ab > 0:
        return cr(a, d) > 0 and cr(d, b) > 0
    if ab == 0 and dot(a, b) > 0:
        return not (cr(a, d) == 0 and dot(a, d) > 0)
    if ab == 0:
        return cr(a, d) > 0
    # sweep wider than a half turn: complement of the closed sweep b..a
    in_ba = cr(b, d) >= 0 and cr(d, a) >= 0
    return not in_ba


def _path_refs(inst: SegmentSet, path: Sequence[Point]) -> list[VertexRef]:
    lookup = inst.ref_of()
    try:
        return [lookup[q] for q in path]
    except KeyError as e:
        raise PreconditionViolated(f"carc vertex {e.args[0]} is not an endpoint") from None


def init_hull_frame(inst: SegmentSet) -> Frame:
    if len(inst) < 2:
        raise AllCollinear("need at least two segments")
    hull = convex_hull(inst.points())
    lookup = inst.ref_of()
    f = Frame(inst, [lookup[q] for q in hull])
    f._record("init", (), [])
    return f


def wedge_report(f: Frame, i: int, j: int) -> Optional[str]:
    """Check that (v_{j+1}, v_j, ..., v_i, v_{i-1}) is a simple polygon outside P.

    ``i..j`` is a run of consecutive cycle positions (cyclic, i may exceed j
    numerically when the run wraps).
    """
    k = len(f.cycle)
    run = []
    x = i
    while True:
        run.append(x % k)
        if x % k == j % k:
            break
        x += 1
        if len(run) > k:
            return "wedge run covers the whole cycle"
    before = (run[0] - 1) % k
    after = (run[-1] + 1) % k
    chain_pos = [before] + run + [after]
    wedge = [f.p(q) for q in reversed(chain_pos)]
    if len(set(wedge)) != len(wedge):
        return "wedge polygon repeats a vertex"
    if not is_simple_polygon(wedge) or signed_area2(wedge) <= 0:
        return "wedge polygon is not simple and ccw"
    in_chain_edge = set(chain_pos[:-1])
    pts = f.pts()
    u, w = pts[before], pts[after]
    for m in range(k):
        if locate(pts[m], wedge) == 1:
            return f"frame vertex {f.cycle[m]} inside wedge"
    for m in range(k):
        if m in in_chain_edge:
            continue
        p, q = pts[m], pts[(m + 1) % k]
        if crosses_properly(p, q, u, w):
            return f"frame edge {f.cycle[m]}-{f.cycle[(m + 1) % k]} crosses the shortcut"
        if locate(p, wedge) == 0 and locate(q, wedge) == 0 and locate(midpoint(p, q), wedge) == 1:
            return f"frame edge {f.cycle[m]}-{f.cycle[(m + 1) % k]} runs through the wedge"
    return None


# ------------------------------------------------------------------ operations

def chop_wedges(f: Frame) -> Frame:
    """Shortcut every maximal run of doubly visited reflex occurrences."""
    while True:
        before = list(f.cycle)
        k = len(f.cycle)
        mult = Counter(f.cycle)
        if all(m <= 1 for m in mult.values()):
            return f
        flags = [mult[f.cycle[i]] == 2 and f.angle_at(i) is Angle.REFLEX for i in range(k)]
        if not any(flags) or all(flags):
            raise F5Violated("doubly visited vertex without a removable reflex occurrence",
                             {"cycle": [str(r) for r in f.cycle]})
        start = next(i for i in range(k) if flags[i] and not flags[i - 1])
        end = start
        while flags[(end + 1) % k]:
            end += 1
        why = wedge_report(f, start, end)
        if why is not None:
            raise F5Violated(f"wedge at {f.cycle[start]}: {why}",
                             {"cycle": [str(r) for r in f.cycle]})
        drop = {x % k for x in range(start, end + 1)}
        f.cycle = [r for i, r in enumerate(f.cycle) if i not in drop]
        f._record("chop", (before[start % k], before[end % k]), before)


def build_cap(f: Frame, rho: int, b: VertexRef) -> Frame:
    """Stretch the edge from b toward its rho-neighbour out to b's partner."""
    if rho not in (1, -1):
        raise PreconditionViolated("orientation must be +1 or -1")
    pos = f.positions(b)
    if len(pos) != 1:
        raise PreconditionViolated(f"{b} must have multiplicity 1, has {len(pos)}")
    a = b.partner()
    if a in f.vertex_set():
        raise PreconditionViolated(f"{a} is already a frame vertex")
    k = len(f.cycle)
    i = pos[0]
    B, A = f.inst.point(b), f.inst.point(a)
    if rho == 1:
        C = f.p(i + 1)
        convex = orient(B, C, A) > 0
    else:
        C = f.p(i - 1)
        convex = orient(B, A, C) > 0
    if not convex:
        raise PreconditionViolated(f"angle at {b} toward its partner is not convex")
    path = carc(A, B, C, f.inst.segments)
    inner = _path_refs(f.inst, path[1:-1])
    before = list(f.cycle)
    if rho == 1:
        f.cycle = f.cycle[:i + 1] + [a] + inner + f.cycle[i + 1:]
    else:
        f.cycle = f.cycle[:i] + list(reversed(inner)) + [a] + f.cycle[i:]
    f._record("build_cap", (rho, b), before)
    return f


def _shoot(f: Frame, apex: Point, through: Point, skip_seg: int):
    """First obstacle along a ray: ("edge", position, x) or raises."""
    best = None
    seg_hits = []
    edge_hits = []
    for s in f.inst.segments:
        if s.id == skip_seg:
            continue
        t = ray_param(apex, through, s.a, s.b)
        if t is None:
            continue
        if best is None or t < best:
            best, seg_hits, edge_hits = t, [s.id], []
        elif t == best:
            seg_hits.append(s.id)
    pts = f.pts()
    k = len(pts)
    for m in range(k):
        t = ray_param(apex, through, pts[m], pts[(m + 1) % k])
        if t is None:
            continue
        if best is None or t < best:
            best, seg_hits, edge_hits = t, [], [m]
        elif t == best:
            edge_hits.append(m)
    if best is None:
        raise PreconditionViolated("ray leaves the frame without hitting it")
    x = point_at(apex, through, best)
    return x, seg_hits, edge_hits


def first_frame_edge(f: Frame, a: VertexRef, b: VertexRef):
    """Where the ray from b through a first meets the frame, past a.

    Returns (position, x) for a non-segment frame edge, raises RayHitsSegment
    when an instance segment comes first.
    """
    A, B = f.inst.point(a), f.inst.point(b)
    through = Point(2 * A.x - B.x, 2 * A.y - B.y)
    x, seg_hits, edge_hits = _shoot(f, A, through, a.seg)
    if seg_hits:
        raise RayHitsSegment(f"ray from {b} through {a} hits segment {seg_hits[0]}")
    pts = f.pts()
    k = len(pts)
    geo = {frozenset((pts[m], pts[(m + 1) % k])) for m in edge_hits}
    if len(geo) > 1 or any(x in (pts[m], pts[(m + 1) % k]) for m in edge_hits):
        raise AmbiguousHit(f"ray from {b} through {a} hits a frame vertex")
    facing = [m for m in edge_hits if orient(pts[m], pts[(m + 1) % k], A) > 0]
    if not facing:
        raise PreconditionViolated(f"{a} is not inside the frame near the hit edge")
    return facing[0], x


def _replace_edge(f: Frame, m: int, a: VertexRef, x: Point, op: str, args: tuple) -> Frame:
    k = len(f.cycle)
    U, V = f.p(m), f.p(m + 1)
    A = f.inst.point(a)
    left = carc(U, x, A, f.inst.segments)
    right = carc(A, x, V, f.inst.segments)
    inner = _path_refs(f.inst, left[1:-1]) + [a] + _path_refs(f.inst, right[1:-1])
    before = list(f.cycle)
    f.cycle = f.cycle[:m + 1] + inner + f.cycle[m + 1:]
    f._record(op, args, before)
    return f


def dip(f: Frame, a: VertexRef, b: VertexRef, require_partner_absent: bool = True) -> Frame:
    """Pull the frame edge hit by the ray from b through a in to a."""
    if a.partner() != b:
        raise PreconditionViolated(f"{a} and {b} are not one segment")
    verts = f.vertex_set()
    if a in verts:
        raise PreconditionViolated(f"{a} is already a frame vertex")
    if require_partner_absent and b in verts:
        raise PreconditionViolated(f"{b} is already a frame vertex")
    m, x = first_frame_edge(f, a, b)
    if f.edge_is_segment(m):
        raise RayHitsSegment(f"ray from {b} through {a} hits a segment edge")
    return _replace_edge(f, m, a, x, "dip", (a, b))


def shear_dip(f: Frame, a: VertexRef, x: Point) -> Frame:
    """Pull the frame edge containing x in to the interior endpoint a."""
    if a in f.vertex_set():
        raise PreconditionViolated(f"{a} is already a frame vertex")
    pts = f.pts()
    k = len(pts)
    A = f.inst.point(a)
    if locate(A, pts) != 1:
        raise PreconditionViolated(f"{a} is not strictly inside the frame")
    cands = [m for m in range(k)
             if on_open_segment(x, pts[m], pts[(m + 1) % k]) and orient(pts[m], pts[(m + 1) % k], A) > 0]
    if not cands:
        raise PreconditionViolated("x is not interior to a frame edge facing a")
    m = cands[0]
    if f.edge_is_segment(m):
        raise PreconditionViolated("x lies on an instance segment")
    host = frozenset((pts[m], pts[(m + 1) % k]))
    for q in range(k):
        p1, p2 = pts[q], pts[(q + 1) % k]
        if frozenset((p1, p2)) == host:
            continue
        if seg_classify(A, x, p1, p2) is not Intersection.DISJOINT:
            raise PreconditionViolated(f"a-x meets frame edge {f.cycle[q]}-{f.cycle[(q + 1) % k]}")
    for s in f.inst.segments:
        if s.id == a.seg:
            other = s.b if a.end == "a" else s.a
            if orient(A, x, other) == 0 and (other.x - A.x) * (x.x - A.x) + (other.y - A.y) * (x.y - A.y) > 0:
                raise PreconditionViolated("a-x runs along a's own segment")
            continue
        if seg_classify(A, x, s.a, s.b) is not Intersection.DISJOINT:
            raise PreconditionViolated(f"a-x meets segment {s.id}")
    return _replace_edge(f, m, a, x, "shear_dip", (a, x))


# ------------------------------------------------------------------ invariants

ALL_FLAGS = ("F1", "F2", "F3", "F4", "F5", "F6", "F7", "R1", "R2", "R3")


def _reflex_runs(f: Frame, mult: Counter) -> list[tuple[int, int]]:
    k = len(f.cycle)
    flags = [mult[f.cycle[i]] == 2 and f.angle_at(i) is Angle.REFLEX for i in range(k)]
    if all(flags):
        return [(0, k - 1)]
    runs = []
    for i in range(k):
        if flags[i] and not flags[i - 1]:
            j = i
            while flags[(j + 1) % k]:
                j += 1
            runs.append((i, j))
    return runs


def _line_crossings(pts: Sequence[Point], positions: Sequence[int], c: Fraction) -> list[tuple[Fraction, int]]:
    k = len(pts)
    ys = []
    for m in positions:
        p, q = pts[m], pts[(m + 1) % k]
        if (p.x - c) * (q.x - c) < 0:
            ys.append((p.y + (q.y - p.y) * (c - p.x) / (q.x - p.x), m))
    return ys


def _sliver(pts: Sequence[Point], m1: int, m2: int) -> bool:
    """For two opposite traversals of one edge: True if the region between them is interior."""
    k = len(pts)
    mid = midpoint(pts[m1], pts[(m1 + 1) % k])
    wn = 0
    for i in range(k):
        if i in (m1, m2):
            continue
        v0, v1 = pts[i], pts[(i + 1) % k]
        if v0.y <= mid.y:
            if v1.y > mid.y and orient(v0, v1, mid) > 0:
                wn += 1
        elif v1.y <= mid.y and orient(v0, v1, mid) < 0:
            wn -= 1
    return wn == 0


def _descending(pts: Sequence[Point], ys: Sequence[tuple[Fraction, int]]) -> bool:
    """Crossings strictly descend, a doubled edge counted in perturbed order."""
    k = len(pts)
    for (y1, m1), (y2, m2) in zip(ys, ys[1:]):
        if y1 > y2:
            continue
        if y1 < y2:
            return False
        p, q = pts[m1], pts[(m1 + 1) % k]
        if (pts[m2], pts[(m2 + 1) % k]) != (q, p):
            return False
        # the later copy sits on the interior side of the first one for a sliver
        side = 1 if _sliver(pts, m1, m2) else -1
        if side * (q.x - p.x) >= 0:
            return False
    return True


def arc_positions(f: Frame) -> tuple[list[int], list[int]]:
    tags = f.arc_tags()
    lower = [i for i, t in enumerate(tags) if t is Arc.LOWER]
    upper = [i for i, t in enumerate(tags) if t is Arc.UPPER]
    il, ir = f.extreme_positions()
    k = len(tags)
    # keep traversal order starting from the arc's first vertex
    lower = sorted(lower, key=lambda i: (i - il) % k)
    upper = sorted(upper, key=lambda i: (i - ir) % k)
    return lower, upper


def check_invariants(f: Frame, flags: Iterable[str], ctx: Optional[LineContext] = None) -> ValidationReport:
    flags = set(flags)
    rep = ValidationReport()
    pts = f.pts()
    k = len(pts)
    mult = Counter(f.cycle)
    ids = set(f.inst.ids)
    if "F1" in flags:
        for r in f.cycle:
            if r.seg not in ids:
                rep.add("F1", (r.seg,), f"vertex {r} is not an instance endpoint")
    if "F2" in flags:
        for m in range(k):
            for q in range(m + 2, k):
                if m == 0 and q == k - 1:
                    continue
                if crosses_properly(pts[m], pts[(m + 1) % k], pts[q], pts[(q + 1) % k]):
                    rep.add("F2", (f.cycle[m].seg, f.cycle[q].seg), "frame edges cross")
        if signed_area2(pts) <= 0:
            rep.add("F2", (), "frame is not ccw with positive area")
        for s in f.inst.segments:
            bad = False
            for m in range(k):
                if crosses_properly(s.a, s.b, pts[m], pts[(m + 1) % k]):
                    rep.add("F2", (s.id,), f"segment crosses frame edge {f.cycle[m]}")
                    bad = True
                    break
            if not bad and locate(midpoint(s.a, s.b), pts) < 0:
                rep.add("F2", (s.id,), "segment lies outside the frame")
    if "F3" in flags:
        for r, m in mult.items():
            if m > 2:
                rep.add("F3", (r.seg,), f"vertex {r} has multiplicity {m}")
    if "F4" in flags:
        for r, m in mult.items():
            if m == 2:
                angs = sorted(f.angle_at(i).value for i in f.positions(r))
                if angs != ["convex", "reflex"]:
                    rep.add("F4", (r.seg,), f"vertex {r} occurrences are {angs}")
    if "F5" in flags:
        for i, j in _reflex_runs(f, mult):
            why = wedge_report(f, i, j)
            if why is not None:
                rep.add("F5", (f.cycle[i % k].seg,), why)
    if ("F6" in flags or "F7" in flags) and ctx is not None:
        lower, upper = arc_positions(f)
        if "F6" in flags:
            for idx, c in enumerate(ctx.separators):
                for name, arc in (("lower", lower), ("upper", upper)):
                    n_cross = len(_line_crossings(pts, arc, c))
                    if n_cross != 1:
                        rep.add("F6", (idx + 1,), f"separator {idx + 1} crosses the {name} arc {n_cross} times")
        if "F7" in flags:
            for idx, c in enumerate(ctx.stabbers):
                for name, arc in (("lower", lower), ("upper", upper)):
                    ys = _line_crossings(pts, arc, c)
                    if len(ys) % 2 != 1:
                        rep.add("F7", (idx + 1,), f"stabber {idx + 1} crosses the {name} arc {len(ys)} times")
                    elif not _descending(pts, ys):
                        rep.add("F7", (idx + 1,), f"stabber {idx + 1} crossings on the {name} arc not decreasing")
    if flags & {"R1", "R2", "R3"}:
        protected = ctx.protected if ctx is not None else set()
        cls = [f.classify(i, mult) for i in range(k)]
        for i in range(k):
            c = cls[i]
            if c.angle is not Angle.REFLEX or c.safety is not Safety.UNSAFE:
                continue
            ref = f.cycle[i]
            is_right = f.inst.point(ref).x > f.inst.point(ref.partner()).x
            for code in ("R1", "R3"):
                if code not in flags or (code == "R3" and ref in protected):
                    continue
                if not is_right:
                    rep.add(code, (ref.seg,), f"unsafe reflex {ref} is not a right endpoint")
                    continue
                for nb in (i - 1, i + 1):
                    cn = cls[nb % k]
                    # a safe reflex neighbour left by a Dip keeps multiplicity 1
                    ok = cn.angle is Angle.CONVEX or (
                        cn.multiplicity == 1 and (code == "R3" or cn.safety is Safety.SAFE))
                    if not ok:
                        rep.add(code, (ref.seg,), f"neighbour {f.cycle[nb % k]} of unsafe {ref} fails")
                why = wedge_report(f, i, i)
                if why is not None:
                    rep.add(code, (ref.seg,), f"triangle at unsafe {ref}: {why}")
        if "R2" in flags:
            for ref in protected:
                if mult[ref] != 1:
                    rep.add("R2", (ref.seg,), f"protected {ref} has multiplicity {mult[ref]}")
    return rep


def safe_reflex_report(f: Frame) -> ValidationReport:
    """Replay the log: safe single reflex vertices never double or turn unsafe."""
    rep = ValidationReport()
    for rec in f.log:
        if rec.op in ("init", "reflect") or not rec.before:
            continue
        before = Frame(rec.inst, rec.before)
        after = Frame(rec.inst, rec.after)
        mult_b = Counter(before.cycle)
        mult_a = Counter(after.cycle)
        for i, r in enumerate(before.cycle):
            c = before.classify(i, mult_b)
            if c.multiplicity != 1 or c.angle is not Angle.REFLEX or c.safety is not Safety.SAFE:
                continue
            if mult_a[r] != 1:
                rep.add("SAFE", (r.seg,), f"safe reflex {r} reached multiplicity {mult_a[r]} after {rec.op}")
                continue
            j = after.positions(r)[0]
            ca = after.classify(j, mult_a)
            if ca.angle is Angle.REFLEX and ca.safety is not Safety.SAFE:
                rep.add("SAFE", (r.seg,), f"safe reflex {r} became unsafe after {rec.op}")
    return rep


def vertex_growth_report(f: Frame) -> ValidationReport:
    """The set of distinct vertices never shrinks across operations."""
    rep = ValidationReport()
    for rec in f.log:
        if rec.before and not set(rec.before) <= set(rec.after):
            lost = set(rec.before) - set(rec.after)
            rep.add("growth", tuple(r.seg for r in lost), f"{rec.op} dropped vertices")
    return rep
