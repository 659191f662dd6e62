"""Segment sets: validation, text I/O and generators."""

from __future__ import annotations

import math
import random as _random
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Iterable, NamedTuple, Optional, Sequence

from .geom import Intersection, Point, Segment, classify, pt


class ParseError(ValueError):
    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


class ValidationError(ValueError):
    pass


class BadParams(ValueError):
    pass


class VertexRef(NamedTuple):
    """One endpoint of one segment."""

    seg: int
    end: str  # "a" or "b"

    def partner(self) -> "VertexRef":
        return VertexRef(self.seg, "b" if self.end == "a" else "a")

    def __str__(self) -> str:
        return f"{self.seg}.{self.end}"

    @classmethod
    def parse(cls, token: str) -> "VertexRef":
        sid, _, end = token.partition(".")
        if end not in ("a", "b") or not sid.lstrip("-").isdigit():
            raise ValueError(f"bad vertex token {token!r}")
        return cls(int(sid), end)


@dataclass(frozen=True)
class Violation:
    code: str
    ids: tuple
    description: str


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, code: str, ids: Iterable, description: str) -> None:
        self.violations.append(Violation(code, tuple(ids), description))

    def extend(self, other: "ValidationReport") -> None:
        self.violations.extend(other.violations)

    def codes(self) -> set:
        return {v.code for v in self.violations}

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "\n".join(f"{v.code} {list(v.ids)}: {v.description}" for v in self.violations)


class SegmentSet:
    """Immutable collection of segments keyed by stable integer ids."""

    __slots__ = ("segments", "_by_id", "_points")

    def __init__(self, segments: Iterable[Segment]):
        segs = tuple(segments)
        by_id = {}
        for s in segs:
            if s.a == s.b:
                raise ValidationError(f"segment {s.id} is degenerate")
            if s.id in by_id:
                raise ValidationError(f"duplicate segment id {s.id}")
            by_id[s.id] = s
        self.segments = segs
        self._by_id = by_id
        self._points = None

    @classmethod
    def from_coords(cls, rows: Iterable[Sequence]) -> "SegmentSet":
        return cls(Segment(i, pt(r[0], r[1]), pt(r[2], r[3])) for i, r in enumerate(rows))

    def __len__(self) -> int:
        return len(self.segments)

    def __iter__(self):
        return iter(self.segments)

    def __eq__(self, other) -> bool:
        return isinstance(other, SegmentSet) and self.segments == other.segments

    def __hash__(self) -> int:
        return hash(self.segments)

    def __repr__(self) -> str:
        return f"SegmentSet(n={len(self)})"

    @property
    def ids(self) -> list[int]:
        return [s.id for s in self.segments]

    def seg(self, sid: int) -> Segment:
        return self._by_id[sid]

    def __contains__(self, sid: int) -> bool:
        return sid in self._by_id

    def point(self, ref: VertexRef) -> Point:
        s = self._by_id[ref.seg]
        return s.a if ref.end == "a" else s.b

    def refs(self) -> list[VertexRef]:
        return [VertexRef(s.id, e) for s in self.segments for e in ("a", "b")]

    def ref_of(self) -> dict:
        """Map from endpoint coordinates back to the endpoint reference."""
        if self._points is None:
            self._points = {self.point(r): r for r in self.refs()}
        return self._points

    def subset(self, ids: Iterable[int]) -> "SegmentSet":
        keep = set(ids)
        return SegmentSet(s for s in self.segments if s.id in keep)

    def points(self) -> list[Point]:
        return [p for s in self.segments for p in (s.a, s.b)]

    def transformed(self, fn) -> "SegmentSet":
        return SegmentSet(Segment(s.id, fn(s.a), fn(s.b)) for s in self.segments)


def reflect_x(p: Point) -> Point:
    """Mirror in the y-axis (x -> -x)."""
    return Point(-p.x, p.y)


def reflect_y(p: Point) -> Point:
    """Mirror in the x-axis (y -> -y)."""
    return Point(p.x, -p.y)


# ---------------------------------------------------------------- validation

def _direction_key(p: Point, q: Point):
    dx = q.x - p.x
    dy = q.y - p.y
    if dx == 0:
        return None
    return dy / dx


def collinear_triples(points: Sequence[Point]) -> list[tuple[int, int, int]]:
    """Index triples of collinear points, found by hashing directions."""
    out = []
    seen = set()
    for i, p in enumerate(points):
        buckets: dict = {}
        for j, q in enumerate(points):
            if j == i:
                continue
            buckets.setdefault(_direction_key(p, q), []).append(j)
        for js in buckets.values():
            if len(js) >= 2:
                for x in range(len(js)):
                    for y in range(x + 1, len(js)):
                        tri = tuple(sorted((i, js[x], js[y])))
                        if tri not in seen:
                            seen.add(tri)
                            out.append(tri)
    return out


def validate_general_position(s: SegmentSet, strict: bool = True) -> ValidationReport:
    """Disjointness and general-position checks.

    ``strict`` adds the no-vertical and distinct-x requirements used by the
    subset pipeline; the relaxed mode is what the oracles need.
    """
    rep = ValidationReport()
    segs = s.segments
    for i in range(len(segs)):
        for j in range(i + 1, len(segs)):
            kind = classify(segs[i].a, segs[i].b, segs[j].a, segs[j].b)
            if kind is not Intersection.DISJOINT:
                rep.add("not_disjoint", (segs[i].id, segs[j].id), f"segments {kind.value}")
    if strict:
        for sg in segs:
            if sg.a.x == sg.b.x:
                rep.add("vertical", (sg.id,), "vertical segment")
        xs: dict = {}
        for sg in segs:
            for p in (sg.a, sg.b):
                xs.setdefault(p.x, []).append(sg.id)
        for x, owners in xs.items():
            if len(set(owners)) > 1:  # a lone vertical segment is reported above
                rep.add("shared_x", tuple(owners), f"endpoints share x = {x}")
    pts = s.points()
    owner = [sg.id for sg in segs for _ in (0, 1)]
    if len(set(pts)) != len(pts):
        rep.add("duplicate_point", (), "repeated endpoint coordinates")
    else:
        for tri in collinear_triples(pts):
            rep.add("collinear", tuple(owner[t] for t in tri), "three collinear endpoints")
    return rep


def require_valid(s: SegmentSet, strict: bool = True) -> SegmentSet:
    rep = validate_general_position(s, strict)
    if not rep.ok:
        raise ValidationError(str(rep))
    return s


# ---------------------------------------------------------------- text I/O

def _parse_scalar(tok: str, line: int) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError(line, f"bad number {tok!r}") from None


def parse_instance(text: str, strict_disjoint: bool = True) -> SegmentSet:
    segs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        toks = body.split()
        if len(toks) != 4:
            raise ParseError(lineno, f"expected 4 numbers, got {len(toks)}")
        ax, ay, bx, by = (_parse_scalar(t, lineno) for t in toks)
        a, b = Point(ax, ay), Point(bx, by)
        if a == b:
            raise ParseError(lineno, "degenerate segment")
        segs.append(Segment(len(segs), a, b))
    s = SegmentSet(segs)
    if strict_disjoint:
        for i in range(len(segs)):
            for j in range(i + 1, len(segs)):
                if classify(segs[i].a, segs[i].b, segs[j].a, segs[j].b) is not Intersection.DISJOINT:
                    raise ValidationError(f"segments {i} and {j} intersect")
    return s


def write_instance(s: SegmentSet, header: Optional[str] = None) -> str:
    lines = []
    if header:
        lines.extend(f"# {h}" for h in header.splitlines())
    for sg in s.segments:
        lines.append(f"{sg.a.x} {sg.a.y} {sg.b.x} {sg.b.y}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- polygons

@dataclass(frozen=True)
class Polygon:
    """Simple polygon over endpoint references, in ccw order."""

    cycle: tuple
    subset: tuple = ()

    def points(self, s: SegmentSet) -> list[Point]:
        return [s.point(r) for r in self.cycle]


def write_polygon(p: Polygon, n_selected: int, n: int) -> str:
    head = f"# selected={n_selected} circumscribed={len(p.subset)} n={n}"
    return head + "\n" + " ".join(str(r) for r in p.cycle) + "\n"


def parse_polygon(text: str) -> Polygon:
    toks = []
    for raw in text.splitlines():
        body = raw.split("#", 1)[0].strip()
        if body:
            toks.extend(body.split())
    cycle = tuple(VertexRef.parse(t) for t in toks)
    ids = sorted({r.seg for r in cycle})
    both = tuple(i for i in ids if VertexRef(i, "a") in cycle and VertexRef(i, "b") in cycle)
    return Polygon(cycle, both)


# ---------------------------------------------------------------- generators

GRID = 10 ** 6


def _unit_rational(t: Fraction) -> tuple[Fraction, Fraction]:
    """Exact rational unit vector from the stereographic parameter t."""
    d = 1 + t * t
    return ((1 - t * t) / d, 2 * t / d)


def _unit_near(theta: float, denom: int = 10 ** 6) -> tuple[Fraction, Fraction]:
    return _unit_rational(Fraction(math.tan(theta / 2)).limit_denominator(denom))


def gen_random(n: int, seed: int = 0, grid: int = GRID, max_tries: int = 20000) -> SegmentSet:
    """Random disjoint segments in general position inside the unit box.

    Work happens in integer grid coordinates; the result is scaled by 1/grid.
    Slopes are kept distinct so that monotone subsequences behave as in the
    Erdos-Szekeres bound.
    """
    if n < 1:
        raise BadParams("n must be positive")
    rng = _random.Random(seed)
    span = max(2, int(2 * grid / math.sqrt(n)))
    pts: list[tuple[int, int]] = []
    dirs: list[set] = []  # per placed point, reduced directions to the others
    used_x: set = set()
    slopes: set = set()
    segs: list[tuple[tuple[int, int], tuple[int, int]]] = []

    def red(dx: int, dy: int):
        if dx == 0:
            return (0, 1)
        g = math.gcd(dx, dy)
        dx //= g
        dy //= g
        if dx < 0:
            dx, dy = -dx, -dy
        return (dx, dy)

    def cr(o, p, q):
        return (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0])

    def crosses(p1, p2, q1, q2):
        d1 = cr(p1, p2, q1)
        d2 = cr(p1, p2, q2)
        d3 = cr(q1, q2, p1)
        d4 = cr(q1, q2, p2)
        # general position holds, so no zero orientations survive here
        return (d1 > 0) != (d2 > 0) and (d3 > 0) != (d4 > 0)

    for _ in range(n):
        for _attempt in range(max_tries):
            p = (rng.randint(0, grid), rng.randint(0, grid))
            dx = rng.randint(-span, span)
            dy = rng.randint(-span, span)
            if dx == 0 or abs(dx) + abs(dy) < span // 8:
                continue
            q = (p[0] + dx, p[1] + dy)
            if not (0 <= q[0] <= grid and 0 <= q[1] <= grid):
                continue
            if p[0] in used_x or q[0] in used_x:
                continue
            sl = red(dx, dy)
            if sl in slopes:
                continue
            dpq = red(q[0] - p[0], q[1] - p[1])
            ok = True
            new_p, new_q = set(), set()
            for i, e in enumerate(pts):
                de_p = red(p[0] - e[0], p[1] - e[1])
                de_q = red(q[0] - e[0], q[1] - e[1])
                if de_p in dirs[i] or de_q in dirs[i] or de_p == de_q:
                    ok = False
                    break
                new_p.add(de_p)
                new_q.add(de_q)
            if not ok or dpq in new_p or dpq in new_q:
                continue
            if any(crosses(p, q, a, b) for a, b in segs):
                continue
            for i, e in enumerate(pts):
                dirs[i].add(red(p[0] - e[0], p[1] - e[1]))
                dirs[i].add(red(q[0] - e[0], q[1] - e[1]))
            new_p.add(dpq)
            new_q.add(dpq)
            pts.append(p)
            dirs.append(new_p)
            pts.append(q)
            dirs.append(new_q)
            used_x.update((p[0], q[0]))
            slopes.add(sl)
            segs.append((p, q))
            break
        else:
            raise BadParams(f"could not place segment {len(segs)} after {max_tries} tries")
    scale = Fraction(1, grid)
    return SegmentSet(
        Segment(i, Point(a[0] * scale, a[1] * scale), Point(b[0] * scale, b[1] * scale))
        for i, (a, b) in enumerate(segs)
    )


def gen_parallel_chords(n: int) -> SegmentSet:
    """Horizontal chords of the unit circle with rational endpoints."""
    if n < 1:
        raise BadParams("n must be positive")
    segs = []
    for i in range(n):
        theta = math.radians(-70 + 140 * (i + 0.37) / n)
        x, y = _unit_near(theta, 1000)
        segs.append(Segment(i, Point(-x, y), Point(x, y)))
    return SegmentSet(segs)


def _rot(v: tuple, c: Fraction, s: Fraction) -> tuple:
    return (c * v[0] - s * v[1], s * v[0] + c * v[1])


LB_STEP = Fraction(1, 400)


def gen_lower_bound(k: int, step: Fraction = LB_STEP) -> SegmentSet:
    """k groups of k near-parallel length-4 segments, all tangencies exact.

    Group i starts from the segment tangent to the unit circle at a_i and
    ending at b_i; its other members are tangent to a unit circle touching
    that segment at b_i, obtained by small exact rotations about that circle's
    centre.
    """
    if k < 2:
        raise BadParams("k must be at least 2")
    segs = []
    for i in range(1, k + 1):
        theta = math.radians(90 - (i - 0.5) * 90 / k)
        nx, ny = _unit_near(theta)
        d = (ny, -nx)  # clockwise tangent, points right
        a = (nx, ny)
        b = (a[0] + 4 * d[0], a[1] + 4 * d[1])
        centre = (b[0] + nx, b[1] + ny)
        for j in range(k):
            c, s = _unit_rational(-step * j)
            rn = _rot((nx, ny), c, s)
            rd = _rot(d, c, s)
            right = (centre[0] - rn[0], centre[1] - rn[1])
            left = (right[0] - 4 * rd[0], right[1] - 4 * rd[1])
            segs.append(Segment(len(segs), Point(*left), Point(*right)))
    out = SegmentSet(segs)
    circles = lower_bound_circles(k, step)
    for i, (p, r) in enumerate(circles):
        for q, r2 in circles[i + 1:]:
            if (p.x - q.x) ** 2 + (p.y - q.y) ** 2 <= (r + r2) ** 2:
                raise BadParams(f"k={k}: tangency circles overlap at this step")
    if not validate_general_position(out, strict=False).ok:
        raise BadParams(f"k={k}: groups collide at this step")
    return out


def lower_bound_groups(k: int) -> list[list[int]]:
    return [list(range(i * k, (i + 1) * k)) for i in range(k)]


def lower_bound_circles(k: int, step: Fraction = LB_STEP) -> list[tuple[Point, Fraction]]:
    """Centres and radii of the per-group tangency circles."""
    out = []
    for i in range(1, k + 1):
        theta = math.radians(90 - (i - 0.5) * 90 / k)
        nx, ny = _unit_near(theta)
        d = (ny, -nx)
        b = (nx + 4 * d[0], ny + 4 * d[1])
        out.append((Point(b[0] + nx, b[1] + ny), Fraction(1)))
    return out


def lower_bound_epsilon(k: int, step: Fraction = LB_STEP) -> Fraction:
    """Upper bound on the slope spread inside a group (exclusive)."""
    # tan of the largest rotation, with generous slack for the steep groups
    c, s = _unit_rational(step * (k - 1))
    return 64 * s / c + Fraction(1, 10 ** 9)


def load_golden(name: str) -> SegmentSet:
    text = resources.files("circpoly").joinpath("data", name).read_text()
    return parse_instance(text)


# pocket right of s5 and below s6 that no vertex left of s5 can see
_POCKET_X = (Fraction(13, 5), Fraction(17, 5))
_POCKET_Y = Fraction(-1, 2)


def gen_three_slope(n: int = 9) -> SegmentSet:
    if n < 9:
        raise BadParams("three_slope needs n >= 9")
    base = load_golden("three_slope9.seg")
    m = n - 9
    if m == 0:
        return base
    s9 = base.seg(8)
    d = Point((s9.a.x - s9.b.x) / (m + 1), (s9.a.y - s9.b.y) / (m + 1))
    x0, x1 = _POCKET_X
    segs = list(base.segments)
    # shrunken copies of s9 on a convex arc inside the pocket, so the hull
    # and the blocking relations stay as they are
    for j in range(m):
        t = (x1 - x0) * j / m
        c = Point(x0 + t, _POCKET_Y + t * t)
        segs.append(Segment(len(segs), c, Point(c.x + d.x, c.y + d.y)))
    out = SegmentSet(segs)
    if not validate_general_position(out, strict=False).ok:
        raise BadParams(f"three_slope n={n}: padding collides")
    return out


GENERATORS = ("random", "diode", "lower_bound", "three_slope", "parallel_chords", "escape_demo")


def generate(kind: str, n: Optional[int] = None, k: Optional[int] = None, seed: int = 0) -> SegmentSet:
    if kind == "random":
        if n is None:
            raise BadParams("random needs n")
        return gen_random(n, seed)
    if kind == "parallel_chords":
        if n is None:
            raise BadParams("parallel_chords needs n")
        return gen_parallel_chords(n)
    if kind == "lower_bound":
        if k is None:
            raise BadParams("lower_bound needs k")
        return gen_lower_bound(k)
    if kind == "three_slope":
        return gen_three_slope(9 if n is None else n)
    if kind == "diode":
        return load_golden("diode.seg")
    if kind == "escape_demo":
        return load_golden("escape_demo.seg")
    raise BadParams(f"unknown generator {kind!r}")
