"""Exact geometric kernel.

Every predicate works on :class:`fractions.Fraction` coordinates; nothing here
ever compares floats.  Points are plain named tuples so they hash and compare
by value.
"""

from __future__ import annotations

import enum
from fractions import Fraction
from typing import Iterable, NamedTuple, Optional, Sequence


class GeometryError(Exception):
    pass


class AllCollinear(GeometryError):
    pass


class AmbiguousHit(GeometryError):
    pass


class PreconditionViolated(GeometryError):
    pass


class Point(NamedTuple):
    x: Fraction
    y: Fraction

    def __str__(self) -> str:
        return f"({self.x}, {self.y})"


def pt(x, y) -> Point:
    return Point(Fraction(x), Fraction(y))


class Segment(NamedTuple):
    id: int
    a: Point
    b: Point

    def endpoints(self) -> tuple[Point, Point]:
        return (self.a, self.b)


class Ray(NamedTuple):
    apex: Point
    through: Point


class Hit(NamedTuple):
    point: Point
    barrier_id: int


Path = list  # list[Point]


class Orientation(enum.IntEnum):
    CW = -1
    COLLINEAR = 0
    CCW = 1


class Intersection(enum.Enum):
    DISJOINT = "disjoint"
    PROPER_CROSS = "proper_cross"
    TOUCH = "touch"


def cross(p: Point, q: Point, r: Point) -> Fraction:
    """Twice the signed area of triangle pqr."""
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])


def orient(p: Point, q: Point, r: Point) -> int:
    c = cross(p, q, r)
    return (c > 0) - (c < 0)


def orientation(p: Point, q: Point, r: Point) -> Orientation:
    return Orientation(orient(p, q, r))


def on_segment(p: Point, a: Point, b: Point) -> bool:
    """True if p lies on the closed segment ab."""
    if orient(a, b, p) != 0:
        return False
    return (min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
            and min(a[1], b[1]) <= p[1] <= max(a[1], b[1]))


def on_open_segment(p: Point, a: Point, b: Point) -> bool:
    return p != a and p != b and on_segment(p, a, b)


def crosses_properly(p1: Point, p2: Point, q1: Point, q2: Point) -> bool:
    """Interiors meet in a single point that is an endpoint of neither."""
    o1 = orient(p1, p2, q1)
    o2 = orient(p1, p2, q2)
    if o1 == 0 or o2 == 0 or o1 == o2:
        return False
    o3 = orient(q1, q2, p1)
    o4 = orient(q1, q2, p2)
    return o3 != 0 and o4 != 0 and o3 != o4


def classify(p1: Point, p2: Point, q1: Point, q2: Point) -> Intersection:
    if crosses_properly(p1, p2, q1, q2):
        return Intersection.PROPER_CROSS
    if (on_segment(q1, p1, p2) or on_segment(q2, p1, p2)
            or on_segment(p1, q1, q2) or on_segment(p2, q1, q2)):
        return Intersection.TOUCH
    return Intersection.DISJOINT


def segments_intersect(s: Segment, t: Segment) -> Intersection:
    return classify(s.a, s.b, t.a, t.b)


def segments_meet(p1: Point, p2: Point, q1: Point, q2: Point) -> bool:
    return classify(p1, p2, q1, q2) is not Intersection.DISJOINT


def signed_area2(poly: Sequence[Point]) -> Fraction:
    total = Fraction(0)
    k = len(poly)
    for i in range(k):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % k]
        total += x0 * y1 - x1 * y0
    return total


def convex_hull(points: Iterable[Point]) -> list[Point]:
    """Strict convex hull in ccw order, starting at the lowest-leftmost point."""
    pts = sorted(set(points))
    if len(pts) < 3:
        raise AllCollinear("fewer than three distinct points")
    lower: list[Point] = []
    for p in pts:
        while len(lower) >= 2 and orient(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and orient(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise AllCollinear("all points are collinear")
    return hull


def locate(p: Point, poly: Sequence[Point]) -> int:
    """1 inside, 0 on the boundary, -1 outside.

    Uses the winding number, so it is correct for weakly simple polygons
    (repeated vertices, edges traversed twice) as long as the traversal is
    consistent.
    """
    k = len(poly)
    wn = 0
    for i in range(k):
        v0 = poly[i]
        v1 = poly[(i + 1) % k]
        if on_segment(p, v0, v1):
            return 0
        if v0[1] <= p[1]:
            if v1[1] > p[1] and orient(v0, v1, p) > 0:
                wn += 1
        elif v1[1] <= p[1] and orient(v0, v1, p) < 0:
            wn -= 1
    return 1 if wn != 0 else -1


def winding_number(p: Point, poly: Sequence[Point]) -> int:
    """Winding number of a closed walk around p (p must not lie on it)."""
    k = len(poly)
    wn = 0
    for i in range(k):
        v0 = poly[i]
        v1 = poly[(i + 1) % k]
        if v0[1] <= p[1]:
            if v1[1] > p[1] and orient(v0, v1, p) > 0:
                wn += 1
        elif v1[1] <= p[1] and orient(v0, v1, p) < 0:
            wn -= 1
    return wn


def is_simple_polygon(poly: Sequence[Point]) -> bool:
    """Strict simplicity: distinct vertices, only adjacent edges touch."""
    k = len(poly)
    if k < 3 or len(set(poly)) != k:
        return False
    if signed_area2(poly) == 0:
        return False
    edges = [(poly[i], poly[(i + 1) % k]) for i in range(k)]
    for i in range(k):
        p1, p2 = edges[i]
        for j in range(i + 1, k):
            q1, q2 = edges[j]
            if j == i + 1 or (i == 0 and j == k - 1):
                shared = p2 if j == i + 1 else p1
                other_p = p1 if j == i + 1 else p2
                other_q = q2 if j == i + 1 else q1
                # adjacent edges may only share their common vertex
                if orient(other_p, shared, other_q) == 0 and k > 3:
                    if on_segment(other_q, other_p, shared) or on_segment(other_p, shared, other_q):
                        return False
                continue
            if segments_meet(p1, p2, q1, q2):
                return False
    return True


def midpoint(p: Point, q: Point) -> Point:
    return Point((p[0] + q[0]) / 2, (p[1] + q[1]) / 2)


def ray_param(apex: Point, through: Point, a: Point, b: Point) -> Optional[Fraction]:
    """Smallest parameter t > 0 with apex + t*(through - apex) on segment ab."""
    dx = through[0] - apex[0]
    dy = through[1] - apex[1]
    ex = b[0] - a[0]
    ey = b[1] - a[1]
    wx = a[0] - apex[0]
    wy = a[1] - apex[1]
    denom = dx * ey - dy * ex
    if denom == 0:
        if wx * dy - wy * dx != 0:
            return None
        # collinear: project both endpoints on the ray direction
        dd = dx * dx + dy * dy
        ts = [((q[0] - apex[0]) * dx + (q[1] - apex[1]) * dy) / dd for q in (a, b)]
        lo, hi = min(ts), max(ts)
        if hi <= 0:
            return None
        if lo <= 0:
            raise PreconditionViolated("ray apex lies on a collinear barrier")
        return lo
    t = (wx * ey - wy * ex) / denom
    s = (wx * dy - wy * dx) / denom
    if t <= 0 or s < 0 or s > 1:
        return None
    return t


def point_at(apex: Point, through: Point, t: Fraction) -> Point:
    return Point(apex[0] + t * (through[0] - apex[0]), apex[1] + t * (through[1] - apex[1]))


def first_hit(ray: Ray, barriers: Iterable[Segment]) -> Optional[Hit]:
    """First barrier point strictly after the apex along the ray."""
    best_t: Optional[Fraction] = None
    best_ids: list[int] = []
    for seg in barriers:
        if on_open_segment(ray.apex, seg.a, seg.b):
            raise PreconditionViolated(f"ray apex on the interior of barrier {seg.id}")
        t = ray_param(ray.apex, ray.through, seg.a, seg.b)
        if t is None:
            continue
        if best_t is None or t < best_t:
            best_t = t
            best_ids = [seg.id]
        elif t == best_t:
            best_ids.append(seg.id)
    if best_t is None:
        return None
    if len(best_ids) > 1:
        raise AmbiguousHit(f"ray hits barriers {best_ids} at the same point")
    return Hit(point_at(ray.apex, ray.through, best_t), best_ids[0])


def in_closed_triangle(p: Point, a: Point, b: Point, c: Point) -> bool:
    s = orient(a, b, c)
    return orient(a, b, p) * s >= 0 and orient(b, c, p) * s >= 0 and orient(c, a, p) * s >= 0


def strictly_inside_triangle(p: Point, a: Point, b: Point, c: Point) -> bool:
    s = orient(a, b, c)
    return s != 0 and orient(a, b, p) == s and orient(b, c, p) == s and orient(c, a, p) == s


def convex_chain(a: Point, b: Point, c: Point, blockers: Iterable[Point]) -> list[Point]:
    """Taut a..c path on b's side of the blocking points inside triangle abc.

    ``blockers`` must already be restricted to the triangle; the path is the
    boundary chain of conv({a, c} + blockers) that faces b.
    """
    pts = [p for p in set(blockers) if p != a and p != c and orient(a, c, p) != 0]
    if not pts:
        return [a, c]
    hull = convex_hull([a, c] + pts)
    k = len(hull)
    ia = hull.index(a)
    ic = hull.index(c)
    if orient(a, c, b) > 0:
        # b left of a->c: ccw hull runs c -> (b side) -> a
        chain = []
        i = ic
        while True:
            chain.append(hull[i])
            if i == ia:
                break
            i = (i + 1) % k
        chain.reverse()
    else:
        chain = []
        i = ia
        while True:
            chain.append(hull[i])
            if i == ic:
                break
            i = (i + 1) % k
    return chain


def blocking_points(a: Point, b: Point, c: Point, barriers: Iterable[Segment]) -> list[Point]:
    """Barrier endpoints that obstruct the guide path (a, b, c) toward ac."""
    s = orient(a, b, c)
    out = []
    for seg in barriers:
        for p, q in ((seg.a, seg.b), (seg.b, seg.a)):
            if p == a or p == c:
                continue
            if strictly_inside_triangle(p, a, b, c):
                out.append(p)
            elif p == b:
                if orient(b, a, q) == -s and orient(b, c, q) == s:
                    out.append(p)
            elif on_open_segment(p, a, b):
                if orient(a, b, q) == s:
                    out.append(p)
            elif on_open_segment(p, b, c):
                if orient(b, c, q) == s:
                    out.append(p)
    return out


def carc(a: Point, b: Point, c: Point, barriers: Sequence[Segment]) -> list[Point]:
    """Shortest path from a to c homotopic to (a, b, c) among the barriers."""
    if len({a, b, c}) != 3:
        raise PreconditionViolated("carc needs three distinct points")
    for seg in barriers:
        if crosses_properly(a, b, seg.a, seg.b) or crosses_properly(b, c, seg.a, seg.b):
            raise PreconditionViolated(f"guide path crosses barrier {seg.id}")
    if orient(a, b, c) == 0:
        return [a, c]
    return convex_chain(a, b, c, blocking_points(a, b, c, barriers))
