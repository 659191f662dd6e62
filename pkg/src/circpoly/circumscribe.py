"""Four-phase construction of a circumscribing polygon for a large subset."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .frame import (
    Arc, Frame, InvariantBreach, LineContext, RayHitsSegment, arc_positions,
    build_cap, check_invariants, chop_wedges, dip, first_frame_edge, init_hull_frame,
    safe_reflex_report, shear_dip, vertex_growth_report,
)
from .geom import (
    AmbiguousHit, Intersection, Point, PreconditionViolated, classify, crosses_properly,
    is_simple_polygon, locate, midpoint, ray_param, point_at, signed_area2,
)
from .instance import Polygon, SegmentSet, ValidationReport, VertexRef, reflect_y, write_polygon
from .select import Selection, select_subset


class ContiguityViolated(InvariantBreach):
    pass


class TooFewSelected(ValueError):
    """The selected subset cannot span a polygon."""


class NoAnchor(InvariantBreach):
    pass


PHASE_FLAGS = {
    1: ("F1", "F2", "F3", "F4", "F5", "F6", "F7", "R1"),
    2: ("F1", "F2", "F3", "F4", "F5", "F6", "F7", "R2", "R3"),
    3: ("F1", "F2", "F3", "F4", "F5", "R2"),
}


@dataclass
class Phase2Plan:
    frame: Frame
    groups: list  # y-ordered id lists after any x-axis mirror
    M: dict  # group index -> sorted positions j whose left endpoint is missing
    I: list
    t: dict  # group index -> position of the leftmost missing left endpoint
    A: dict
    B: dict
    f_edges: list  # lower-arc edges crossing separators, left to right
    crossing: dict  # separator index -> index into f_edges
    J: list  # groups reached by ShearDip
    odd: bool  # True when J came from odd-indexed crossing edges
    rho_overrides: dict
    mirrored: bool  # frame was mirrored in the x-axis so the upper arc wins
    x: dict = field(default_factory=dict)
    skipped: list = field(default_factory=list)

    @property
    def protected(self) -> set:
        inst = self.frame.inst
        out = set()
        for i in self.J:
            sid = self.groups[i][self.t[i]]
            out.add(left_ref(inst, sid))
        return out

    def dump(self) -> str:
        lines = [f"I={[i + 1 for i in self.I]} J={[i + 1 for i in self.J]} "
                 f"parity={'odd' if self.odd else 'even'} mirrored={'yes' if self.mirrored else 'no'}"]
        for i in self.I:
            lines.append(f"group {i + 1}: M={[j + 1 for j in self.M[i]]} t={self.t[i] + 1} "
                         f"|A|={len(self.A[i])} |B|={len(self.B[i])}")
        return "\n".join(lines)


@dataclass
class CircResult:
    polygon: Polygon
    subset: list
    selected: list
    n: int
    reflected: bool
    mirrored: bool
    op_counts: dict
    selection: Selection
    frames: dict  # phase number -> frame snapshot (working coordinates)

    def text(self) -> str:
        return write_polygon(self.polygon, len(self.selected), self.n)


def left_ref(inst: SegmentSet, sid: int) -> VertexRef:
    s = inst.seg(sid)
    return VertexRef(sid, "a" if s.a.x < s.b.x else "b")


def _breach(cls, msg: str, f: Frame, extra: Optional[dict] = None):
    bundle = {"cycle": [str(r) for r in f.cycle],
              "ops": [(r.op, tuple(str(a) for a in r.args)) for r in f.log]}
    if extra:
        bundle.update(extra)
    return cls(msg, bundle)


def _require(rep: ValidationReport, what: str, f: Frame) -> None:
    if not rep.ok:
        raise _breach(InvariantBreach, f"{what}: {rep}", f)


def _run(op, f: Frame, *args, **kw):
    try:
        return op(f, *args, **kw)
    except InvariantBreach:
        raise
    except PreconditionViolated as e:
        raise _breach(InvariantBreach, f"{op.__name__}{tuple(str(a) for a in args)}: {e}", f) from e


def _dip_target(f: Frame, group: Sequence[int], a: VertexRef, b: VertexRef) -> bool:
    """Ray from b through a hits a non-segment edge whose left end is in the group."""
    try:
        m, _x = first_frame_edge(f, a, b)
    except RayHitsSegment:
        return False
    if f.edge_is_segment(m):
        return False
    u, v = f.cycle[m], f.cycle[(m + 1) % len(f.cycle)]
    pu, pv = f.inst.point(u), f.inst.point(v)
    leftmost = u if pu.x < pv.x else v
    return leftmost.seg in group


def _grow_loop(f: Frame, groups: list, both_inside: bool) -> None:
    """Repeat the BuildCap / Dip steps of the first two phases until stuck."""
    inst = f.inst
    while True:
        verts = f.vertex_set()
        done = False
        for g in groups:
            for sid in g:
                a = left_ref(inst, sid)
                if a in verts and a.partner() not in verts:
                    _run(build_cap, f, f.rho_of(a), a)
                    done = True
                    break
            if done:
                break
        if done:
            continue
        for g in groups:
            for sid in g:
                a = left_ref(inst, sid)
                b = a.partner()
                if a in verts or (both_inside and b in verts):
                    continue
                if _dip_target(f, g, a, b):
                    _run(dip, f, a, b, require_partner_absent=False)
                    done = True
                    break
            if done:
                break
        if not done:
            return


def phase1(f: Frame, sel: Selection) -> Frame:
    _grow_loop(f, sel.groups, both_inside=False)
    return f


def _arc_membership(f: Frame) -> tuple[set, set]:
    lower, upper = arc_positions(f)
    return {f.cycle[i] for i in lower}, {f.cycle[i] for i in upper}


def contiguity_report(f: Frame, groups: list) -> ValidationReport:
    """Left endpoints on the lower arc form a prefix, on the upper arc a suffix."""
    rep = ValidationReport()
    low, up = _arc_membership(f)
    inst = f.inst
    for gi, g in enumerate(groups):
        refs = [left_ref(inst, sid) for sid in g]
        for j, r in enumerate(refs):
            if r in low and not all(q in low for q in refs[:j]):
                rep.add("L3", (r.seg,), f"group {gi + 1}: lower-arc left endpoints not a prefix")
            if r in up and not all(q in up for q in refs[j + 1:]):
                rep.add("L3", (r.seg,), f"group {gi + 1}: upper-arc left endpoints not a suffix")
        missing = [j for j, r in enumerate(refs) if r not in f.vertex_set()]
        if missing and missing != list(range(missing[0], missing[-1] + 1)):
            rep.add("L3", tuple(g[j] for j in missing), f"group {gi + 1}: missing set not contiguous")
    return rep


def _middle_sets(f: Frame, groups: list):
    inst = f.inst
    verts = f.vertex_set()
    M, t, A, B = {}, {}, {}, {}
    for gi, g in enumerate(groups):
        miss = [j for j, sid in enumerate(g) if left_ref(inst, sid) not in verts]
        if not miss:
            continue
        M[gi] = miss
        t[gi] = min(miss, key=lambda j: inst.point(left_ref(inst, g[j])).x)
        A[gi] = [g[j] for j in miss if j >= t[gi]]
        B[gi] = [g[j] for j in miss if j <= t[gi]]
    return M, t, A, B


def plan_phase2(f: Frame, sel: Selection) -> Phase2Plan:
    groups = [list(g) for g in sel.groups]
    rep = contiguity_report(f, groups)
    if not rep.ok:
        raise _breach(ContiguityViolated, str(rep), f)
    M, t, A, B = _middle_sets(f, groups)
    mirrored = False
    if sum(map(len, A.values())) < sum(map(len, B.values())):
        # reach the hidden endpoints from the other arc by mirroring y
        f = f.reflected(reflect_y)
        groups = [list(reversed(g)) for g in groups]
        mirrored = True
        M, t, A, B = _middle_sets(f, groups)
    I = sorted(M)
    pts = f.pts()
    k = len(pts)
    lower, _upper = arc_positions(f)
    f_edges: list = []
    crossing: dict = {}
    for m in lower:
        p, q = pts[m], pts[(m + 1) % k]
        hit = [li for li, c in enumerate(sel.separators) if (p.x - c) * (q.x - c) < 0]
        if hit:
            f_edges.append((f.cycle[m], f.cycle[(m + 1) % k]))
            for li in hit:
                crossing[li] = len(f_edges)  # 1-based index of the edge
    # group i (0-based) sits right of separator i-1
    odd_side = [i for i in I if i >= 1 and crossing.get(i - 1, 0) % 2 == 1]
    even_side = [i for i in I if i not in odd_side]

    def cover(side):
        return len({sid for i in side for sid in A[i]})

    odd = cover(odd_side) >= cover(even_side)
    J = odd_side if odd else even_side
    overrides = {}
    for idx, (u, v) in enumerate(f_edges, 1):
        if (idx % 2 == 1) == odd:
            pu, pv = f.inst.point(u), f.inst.point(v)
            left, right = (u, v) if pu.x < pv.x else (v, u)
            overrides[left] = -1
            overrides[right] = 1
    f.rho.update(overrides)
    return Phase2Plan(f, groups, M, I, t, A, B, f_edges, crossing, J, odd, overrides, mirrored)


def compute_xi(f: Frame, group: Sequence[int], a: VertexRef) -> Point:
    """Anchor on the upper arc that the hidden endpoint a can be joined to."""
    inst = f.inst
    A = inst.point(a)
    up = Point(A.x, A.y + 1)
    pts = f.pts()
    k = len(pts)
    _lower, upper = arc_positions(f)
    best = None
    hit_edge = None
    hit_seg = None
    for m in upper:
        tt = ray_param(A, up, pts[m], pts[(m + 1) % k])
        if tt is not None and (best is None or tt < best):
            best, hit_edge, hit_seg = tt, m, None
    for sid in group:
        if sid == a.seg:
            continue
        s = inst.seg(sid)
        tt = ray_param(A, up, s.a, s.b)
        if tt is not None and (best is None or tt <= best):
            best, hit_edge, hit_seg = tt, None, sid
    if best is None:
        raise _breach(NoAnchor, f"vertical ray from {a} meets nothing", f)
    if hit_seg is None and not f.edge_is_segment(hit_edge):
        return point_at(A, up, best)
    if hit_seg is None:
        hit_seg = f.cycle[hit_edge].seg
    top = left_ref(inst, hit_seg)
    where = [i for i in upper if f.cycle[i] == top]
    if not where:
        raise _breach(NoAnchor, f"left end {top} of the blocking segment is not on the upper arc", f)
    pos = where[0]
    P0 = inst.point(top)
    P1 = f.p(pos + 1)
    # sweep x from the vertex along the edge until the first endpoint event
    dx, dy = P1.x - P0.x, P1.y - P0.y
    tstar = Fraction(1)
    for q in inst.points():
        if q == A or q == P0:
            continue
        ex, ey = q.x - A.x, q.y - A.y
        den = ex * dy - ey * dx
        if den == 0:
            continue
        tt = ((P0.x - A.x) * ey - (P0.y - A.y) * ex) / den
        if 0 < tt < tstar:
            tstar = tt
    x = Point(P0.x + tstar / 2 * dx, P0.y + tstar / 2 * dy)
    for q in range(k):
        p1, p2 = pts[q], pts[(q + 1) % k]
        if q == pos or (p1 == P1 and p2 == P0) or (p1 == P0 and p2 == P1):
            continue
        if classify(A, x, p1, p2) is not Intersection.DISJOINT:
            raise _breach(NoAnchor, f"anchor segment from {a} meets the frame", f)
    for s in inst.segments:
        if s.id != a.seg and classify(A, x, s.a, s.b) is not Intersection.DISJOINT:
            raise _breach(NoAnchor, f"anchor segment from {a} meets segment {s.id}", f)
    return x


def phase2(f: Frame, plan: Phase2Plan) -> Frame:
    inst = f.inst
    for i in plan.J:
        a = left_ref(inst, plan.groups[i][plan.t[i]])
        if a in f.vertex_set():
            plan.skipped.append(i)
            continue
        x = compute_xi(f, plan.groups[i], a)
        plan.x[i] = x
        _run(shear_dip, f, a, x)
    _grow_loop(f, plan.groups, both_inside=True)
    return f


def phase3(f: Frame, groups: list) -> Frame:
    while True:
        verts = f.vertex_set()
        todo = None
        for g in groups:
            for sid in g:
                ra, rb = VertexRef(sid, "a"), VertexRef(sid, "b")
                if (ra in verts) != (rb in verts):
                    todo = ra if ra in verts else rb
                    break
            if todo is not None:
                break
        if todo is None:
            return f
        _run(build_cap, f, f.rho_of(todo), todo)


def half_visited(f: Frame) -> list[int]:
    verts = f.vertex_set()
    return [s.id for s in f.inst.segments
            if (VertexRef(s.id, "a") in verts) != (VertexRef(s.id, "b") in verts)]


def phase4(f: Frame) -> Frame:
    return chop_wedges(f)


def circumscribe(s: SegmentSet, check: bool = True, sel: Optional[Selection] = None) -> CircResult:
    """Run selection and the four phases; returns a verified polygon."""
    sel = sel or select_subset(s)
    if len(sel.subset) < 2:
        raise TooFewSelected(f"selection kept {len(sel.subset)} segment; a polygon needs at least two")
    f = init_hull_frame(sel.inst)
    ctx = LineContext(list(sel.separators), list(sel.stabbers), set())
    frames = {}
    if check:
        _require(check_invariants(f, PHASE_FLAGS[1], ctx), "hull frame", f)
    phase1(f, sel)
    frames[1] = f.copy()
    if check:
        _require(check_invariants(f, PHASE_FLAGS[1], ctx), "after phase 1", f)
    plan = plan_phase2(f, sel)
    f = plan.frame
    ctx.protected = plan.protected
    phase2(f, plan)
    frames[2] = f.copy()
    if check:
        _require(check_invariants(f, PHASE_FLAGS[2], ctx), "after phase 2", f)
    phase3(f, plan.groups)
    frames[3] = f.copy()
    if check:
        _require(check_invariants(f, PHASE_FLAGS[3], ctx), "after phase 3", f)
        left = half_visited(f)
        if left:
            raise _breach(InvariantBreach, f"half-visited segments after phase 3: {left}", f)
    phase4(f)
    frames[4] = f.copy()
    if check:
        _require(safe_reflex_report(f), "safe reflex replay", f)
        _require(vertex_growth_report(f), "vertex growth", f)
    verts = f.vertex_set()
    sub = sorted(sid for sid in sel.subset
                 if VertexRef(sid, "a") in verts and VertexRef(sid, "b") in verts)
    cycle = list(f.cycle)
    poly_pts = [s.point(r) for r in cycle]
    if signed_area2(poly_pts) < 0:
        cycle.reverse()
    poly = Polygon(tuple(cycle), tuple(sub))
    if check:
        _require(verify_circumscribing(poly, s, sub), "final polygon", f)
    counts = Counter(r.op for r in f.log)
    return CircResult(poly, sub, list(sel.subset), len(s), sel.reflected, plan.mirrored,
                      dict(counts), sel, frames)


# ------------------------------------------------------------------ verifiers

def verify_circumscribing(p: Polygon, s: SegmentSet, subset: Optional[Sequence[int]] = None) -> ValidationReport:
    rep = ValidationReport()
    subset = list(p.subset if subset is None else subset)
    try:
        pts = p.points(s)
    except KeyError as e:
        rep.add("vertex", (), f"unknown vertex {e}")
        return rep
    if not is_simple_polygon(pts):
        rep.add("simple", (), "polygon is not simple")
        return rep
    want = {VertexRef(i, e) for i in subset for e in ("a", "b")}
    have = set(p.cycle)
    if want != have:
        extra = sorted({r.seg for r in have - want})
        miss = sorted({r.seg for r in want - have})
        rep.add("vertex_set", tuple(extra + miss), f"extra {extra} missing {miss}")
    k = len(pts)
    edges = {frozenset((p.cycle[i], p.cycle[(i + 1) % k])) for i in range(k)}
    for sid in subset:
        seg = s.seg(sid)
        if frozenset((VertexRef(sid, "a"), VertexRef(sid, "b"))) in edges:
            continue
        if any(crosses_properly(seg.a, seg.b, pts[i], pts[(i + 1) % k]) for i in range(k)):
            rep.add("diagonal", (sid,), "segment crosses the polygon")
        elif locate(midpoint(seg.a, seg.b), pts) != 1:
            rep.add("diagonal", (sid,), "segment is an external diagonal")
    return rep


def verify_polygonization(p: Polygon, s: SegmentSet) -> ValidationReport:
    rep = verify_circumscribing(p, s, s.ids)
    if rep.codes() & {"simple", "vertex"}:
        return rep
    k = len(p.cycle)
    edges = {frozenset((p.cycle[i], p.cycle[(i + 1) % k])) for i in range(k)}
    for sid in s.ids:
        if frozenset((VertexRef(sid, "a"), VertexRef(sid, "b"))) not in edges:
            rep.add("edge", (sid,), "segment is not a polygon edge")
    return rep
