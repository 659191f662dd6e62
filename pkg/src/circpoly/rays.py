"""Ray extensions of segments: 2SAT for disjoint rays, escape routes, and the
polygon they certify."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .circumscribe import verify_circumscribing
from .frame import (
    Frame, InvariantBreach, build_cap, check_invariants, chop_wedges, dip, init_hull_frame,
)
from .geom import (
    AllCollinear, Point, PreconditionViolated, convex_hull, crosses_properly, locate, on_segment,
    point_at, ray_param,
)
from .instance import Polygon, SegmentSet, VertexRef


class Extend(enum.Enum):
    PAST_B = "+"  # ray with apex a through b
    PAST_A = "-"


EXTEND_PAST_B = Extend.PAST_B
EXTEND_PAST_A = Extend.PAST_A


@dataclass
class RayChoice:
    choice: dict  # segment id -> Extend

    def ray(self, s: SegmentSet, sid: int) -> tuple[Point, Point]:
        """(apex, direction) of the chosen ray."""
        seg = s.seg(sid)
        if self.choice[sid] is Extend.PAST_B:
            return seg.a, Point(seg.b.x - seg.a.x, seg.b.y - seg.a.y)
        return seg.b, Point(seg.a.x - seg.b.x, seg.a.y - seg.b.y)

    def text(self) -> str:
        return "".join(self.choice[i].value for i in sorted(self.choice))

    @classmethod
    def parse(cls, text: str, ids: Sequence[int]) -> "RayChoice":
        bits = text.strip()
        if len(bits) != len(ids) or set(bits) - {"+", "-"}:
            raise ValueError("ray choice must be one +/- per segment")
        return cls({i: Extend(c) for i, c in zip(sorted(ids), bits)})


@dataclass
class EscapeOrder:
    order: list  # segment ids
    tail: dict  # segment id -> "a" or "b", the endpoint the ray leaves from
    extension_end: dict = field(default_factory=dict)  # id -> Point

    def b_ref(self, sid: int) -> VertexRef:
        return VertexRef(sid, self.tail[sid])

    def a_ref(self, sid: int) -> VertexRef:
        return self.b_ref(sid).partner()

    def text(self) -> str:
        return " ".join(f"{i}:{self.tail[i]}" for i in self.order)

    @classmethod
    def parse(cls, text: str) -> "EscapeOrder":
        order, tail = [], {}
        for tok in text.split():
            sid, _, end = tok.partition(":")
            if end not in ("a", "b"):
                raise ValueError(f"bad escape token {tok!r}")
            order.append(int(sid))
            tail[int(sid)] = end
        if len(set(order)) != len(order):
            raise ValueError("escape order repeats a segment")
        return cls(order, tail)


# ------------------------------------------------------------------ 2SAT

@dataclass
class TwoSatInstance:
    n_vars: int
    clauses: list = field(default_factory=list)  # ((var, value), (var, value)): one must hold

    def add(self, l1: tuple, l2: tuple) -> None:
        self.clauses.append((l1, l2))

    def satisfied_by(self, assign: Sequence[bool]) -> bool:
        return all(assign[v1] == b1 or assign[v2] == b2 for (v1, b1), (v2, b2) in self.clauses)


def _lit(v: int, val: bool) -> int:
    return 2 * v + (0 if val else 1)


def _components(t: TwoSatInstance) -> list[int]:
    """Tarjan SCC ids on the implication graph, in reverse topological order."""
    n = 2 * t.n_vars
    adj: list[list[int]] = [[] for _ in range(n)]
    for (v1, b1), (v2, b2) in t.clauses:
        adj[_lit(v1, not b1)].append(_lit(v2, b2))
        adj[_lit(v2, not b2)].append(_lit(v1, b1))
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    comp = [-1] * n
    stack: list[int] = []
    counter = 0
    n_comp = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            if i < len(adj[v]):
                work[-1] = (v, i + 1)
                w = adj[v][i]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = n_comp
                    if w == v:
                        break
                n_comp += 1
    return comp


def two_sat_solve(t: TwoSatInstance) -> Optional[list[bool]]:
    comp = _components(t)
    out = []
    for v in range(t.n_vars):
        ct, cf = comp[_lit(v, True)], comp[_lit(v, False)]
        if ct == cf:
            return None
        # Tarjan numbers sinks first; pick the literal later in topological order
        out.append(ct < cf)
    return out


def two_sat_conflict(t: TwoSatInstance) -> Optional[int]:
    """A variable forced both ways, or None if satisfiable."""
    comp = _components(t)
    for v in range(t.n_vars):
        if comp[_lit(v, True)] == comp[_lit(v, False)]:
            return v
    return None


# ------------------------------------------------------------------ rays

def rays_meet(p1: Point, d1: Point, p2: Point, d2: Point) -> bool:
    """Exact test whether closed rays p1 + t d1 and p2 + s d2 share a point."""
    den = d1.x * d2.y - d1.y * d2.x
    wx, wy = p2.x - p1.x, p2.y - p1.y
    if den != 0:
        t = (wx * d2.y - wy * d2.x) / den
        s = (wx * d1.y - wy * d1.x) / den
        return t >= 0 and s >= 0
    if wx * d1.y - wy * d1.x != 0:
        return False
    if d1.x * d2.x + d1.y * d2.y > 0:
        return True
    return wx * d1.x + wy * d1.y >= 0


def _ray_of(s: SegmentSet, sid: int, ext: Extend) -> tuple[Point, Point]:
    return RayChoice({sid: ext}).ray(s, sid)


def build_extension_clauses(s: SegmentSet) -> TwoSatInstance:
    """Variable i true means segment ids[i] extends past its b endpoint."""
    ids = s.ids
    t = TwoSatInstance(len(ids))
    opts = (Extend.PAST_B, Extend.PAST_A)
    rays = {(i, e): _ray_of(s, i, e) for i in ids for e in opts}
    for x, i in enumerate(ids):
        for y in range(x + 1, len(ids)):
            j = ids[y]
            for ei in opts:
                for ej in opts:
                    if rays_meet(*rays[(i, ei)], *rays[(j, ej)]):
                        t.add((x, ei is not Extend.PAST_B), (y, ej is not Extend.PAST_B))
    return t


def rays_disjoint(s: SegmentSet, rc: RayChoice) -> bool:
    ids = s.ids
    rays = [rc.ray(s, i) for i in ids]
    return not any(rays_meet(*rays[x], *rays[y])
                   for x in range(len(ids)) for y in range(x + 1, len(ids)))


def ray_extensible(s: SegmentSet) -> Optional[RayChoice]:
    t = build_extension_clauses(s)
    sol = two_sat_solve(t)
    if sol is None:
        return None
    rc = RayChoice({i: Extend.PAST_B if v else Extend.PAST_A for i, v in zip(s.ids, sol)})
    if not rays_disjoint(s, rc):
        raise InvariantBreach("2SAT assignment gives intersecting rays", {"choice": rc.text()})
    return rc


# ------------------------------------------------------------------ escape routes

@dataclass
class EscapeReport:
    ok: bool
    order: Optional[EscapeOrder]
    failed: Optional[int] = None  # first segment whose ray hits a segment
    full_ray_ok: bool = True  # verdict when earlier rays are not truncated


class EscapeContext:
    """Fixed barriers for extension shooting: the segments and the hull boundary."""

    def __init__(self, s: SegmentSet):
        self.s = s
        try:
            hull = convex_hull(s.points())
        except AllCollinear:
            # a single segment: both endpoints lie on the boundary
            self.hull, self.hull_pts = [], set(s.points())
            return
        self.hull = [(hull[i], hull[(i + 1) % len(hull)]) for i in range(len(hull))]
        self.hull_pts = set(hull)

    def tail_head(self, sid: int, tail: str) -> tuple[Point, Point]:
        seg = self.s.seg(sid)
        return (seg.b, seg.a) if tail == "b" else (seg.a, seg.b)

    def shoot(self, sid: int, tail: str, extensions: Sequence[tuple[Point, Point]]) -> Optional[Point]:
        """End of the extension past the tail, or None if a segment comes first."""
        B, A = self.tail_head(sid, tail)
        if B in self.hull_pts:
            return B
        through = Point(2 * B.x - A.x, 2 * B.y - A.y)
        best = None
        blocked = False
        for o in self.s.segments:
            if o.id == sid:
                continue
            t = ray_param(B, through, o.a, o.b)
            if t is not None and (best is None or t < best):
                best, blocked = t, True
        for p0, p1 in extensions:
            if p0 == p1:
                continue
            t = ray_param(B, through, p0, p1)
            if t is not None and (best is None or t < best):
                best, blocked = t, False
        for u, v in self.hull:
            t = ray_param(B, through, u, v)
            if t is not None and (best is None or t < best):
                best, blocked = t, False
        if best is None or blocked:
            return None
        return point_at(B, through, best)


def escape_report(s: SegmentSet, order: Sequence[int], tails: dict) -> EscapeReport:
    order = list(order)
    if len(set(order)) != len(order) or not set(order) <= set(s.ids):
        raise ValueError("order must list distinct segment ids")
    ctx = EscapeContext(s)
    ends: dict = {}
    exts: list = []
    failed = None
    full_ok = True
    full_rays: list[tuple[Point, Point]] = []
    for sid in order:
        B, A = ctx.tail_head(sid, tails[sid])
        through = Point(2 * B.x - A.x, 2 * B.y - A.y)
        # full-ray reading: earlier rays run to infinity and the hull is no barrier
        seg_t = min((t for o in s.segments if o.id != sid
                     for t in [ray_param(B, through, o.a, o.b)] if t is not None), default=None)
        ray_t = min((t for apex, d in full_rays
                     for t in [_ray_ray_param(B, through, apex, d)] if t is not None), default=None)
        if seg_t is not None and (ray_t is None or seg_t <= ray_t):
            full_ok = False
        full_rays.append((B, Point(B.x - A.x, B.y - A.y)))
        if failed is not None:
            continue
        end = ctx.shoot(sid, tails[sid], exts)
        if end is None:
            failed = sid
            continue
        ends[sid] = end
        exts.append((B, end))
    if failed is not None:
        return EscapeReport(False, None, failed, full_ok)
    return EscapeReport(True, EscapeOrder(order, dict(tails), ends), None, full_ok)


def _ray_ray_param(apex: Point, through: Point, p: Point, d: Point) -> Optional[Fraction]:
    """First t > 0 where apex + t(through - apex) meets the closed ray p + s d."""
    dx, dy = through.x - apex.x, through.y - apex.y
    den = dx * d.y - dy * d.x
    wx, wy = p.x - apex.x, p.y - apex.y
    if den == 0:
        return None  # no three endpoints collinear, so parallel rays never overlap
    t = (wx * d.y - wy * d.x) / den
    u = (wx * dy - wy * dx) / den
    if t > 0 and u >= 0:
        return t
    return None


def escape_check(s: SegmentSet, order: Sequence[int], tails: dict) -> Optional[EscapeOrder]:
    return escape_report(s, order, tails).order


def rays_to_escape_order(s: SegmentSet, rc: RayChoice) -> EscapeOrder:
    tails = {i: "b" if rc.choice[i] is Extend.PAST_B else "a" for i in s.ids}
    e = escape_check(s, s.ids, tails)
    if e is None:
        raise InvariantBreach("disjoint rays failed the escape check", {"choice": rc.text()})
    return e


# ------------------------------------------------------------------ polygon

def extension_report(f: Frame, start: Point, end: Point) -> Optional[str]:
    """None if the closed extension piece avoids the open interior of the frame."""
    pts = f.pts()
    k = len(pts)
    if start == end:
        return None
    cuts = {Fraction(0), Fraction(1)}
    dx, dy = end.x - start.x, end.y - start.y
    dd = dx * dx + dy * dy
    for m in range(k):
        p, q = pts[m], pts[(m + 1) % k]
        if crosses_properly(start, end, p, q):
            return f"extension crosses frame edge {f.cycle[m]}-{f.cycle[(m + 1) % k]}"
        for r in (p, q):
            if on_segment(r, start, end):
                cuts.add(((r.x - start.x) * dx + (r.y - start.y) * dy) / dd)
    cuts = sorted(cuts)
    for t0, t1 in zip(cuts, cuts[1:]):
        tm = (t0 + t1) / 2
        if locate(Point(start.x + tm * dx, start.y + tm * dy), pts) == 1:
            return "extension enters the frame interior"
    return None


def escape_polygon(s: SegmentSet, e: EscapeOrder, check: bool = True) -> Polygon:
    """Circumscribing polygon for all of s from a verified escape order."""
    if e.extension_end == {} and e.order:
        rep = escape_report(s, e.order, e.tail)
        if not rep.ok:
            raise PreconditionViolated(f"escape order fails at segment {rep.failed}")
        e = rep.order
    if sorted(e.order) != s.ids:
        raise PreconditionViolated("escape order must cover every segment")
    f = init_hull_frame(s)

    def bundle() -> dict:
        return {"cycle": [str(r) for r in f.cycle], "order": e.text()}

    done: list[int] = []
    for sid in e.order:
        b, a = e.b_ref(sid), e.a_ref(sid)
        if b not in f.vertex_set():
            try:
                dip(f, b, a, require_partner_absent=False)
            except PreconditionViolated as err:
                raise InvariantBreach(f"dip at {b}: {err}", bundle()) from err
        done.append(sid)
        if check:
            for j in done:
                why = extension_report(f, s.point(e.b_ref(j)), e.extension_end[j])
                if why is not None:
                    raise InvariantBreach(f"F8 at segment {j} after step {sid}: {why}", bundle())
    if check:
        rep = check_invariants(f, ("F1", "F2", "F3", "F4", "F5"))
        if not rep.ok:
            raise InvariantBreach(f"after dips: {rep}", bundle())
    for sid in e.order:
        b, a = e.b_ref(sid), e.a_ref(sid)
        if a not in f.vertex_set():
            try:
                build_cap(f, 1, b)
            except PreconditionViolated as err:
                raise InvariantBreach(f"cap at {b}: {err}", bundle()) from err
    if check:
        rep = check_invariants(f, ("F1", "F2", "F3", "F4", "F5"))
        if not rep.ok:
            raise InvariantBreach(f"after caps: {rep}", bundle())
    chop_wedges(f)
    poly = Polygon(tuple(f.cycle), tuple(s.ids))
    if check:
        rep = verify_circumscribing(poly, s, s.ids)
        if not rep.ok:
            raise InvariantBreach(f"escape polygon: {rep}", bundle())
    return poly
