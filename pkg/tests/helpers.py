"""Independent reference implementations used only by the tests."""

import heapq
import itertools
import math
import random
from fractions import Fraction

from circpoly.geom import Point, Segment, crosses_properly, in_closed_triangle, orient, pt


def brute_hull_vertices(points):
    """Points p with a closed half-plane through p containing all other points
    and no other point on its boundary line (general position input)."""
    out = set()
    for p in points:
        for q in points:
            if q == p:
                continue
            if all(orient(p, q, r) >= 0 for r in points):
                out.add(p)
                out.add(q)
    return out


def random_points(rng, n, lo=-20, hi=20):
    while True:
        pts = list({pt(rng.randint(lo, hi), rng.randint(lo, hi)) for _ in range(n)})
        if len(pts) < 3:
            continue
        if any(orient(a, b, c) == 0 for a, b, c in itertools.combinations(pts, 3)):
            continue
        return pts


def dijkstra_in_triangle(a, b, c, barriers):
    """Shortest a->c path in the closed triangle abc avoiding barrier interiors."""
    nodes = [a, c] + sorted({p for s in barriers for p in (s.a, s.b)
                             if in_closed_triangle(p, a, b, c) and p not in (a, c)})

    def free(u, v):
        for s in barriers:
            if crosses_properly(u, v, s.a, s.b):
                return False
            # passing through a barrier endpoint counts as touching, not crossing;
            # general position keeps other endpoints off the open edge
        return True

    dist = {a: 0.0}
    prev = {}
    heap = [(0.0, 0, a)]
    order = {p: i for i, p in enumerate(nodes)}
    done = set()
    while heap:
        d, _, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        if u == c:
            break
        for v in nodes:
            if v in done or not free(u, v):
                continue
            nd = d + math.dist((float(u.x), float(u.y)), (float(v.x), float(v.y)))
            if nd < dist.get(v, math.inf) - 1e-12:
                dist[v] = nd
                prev[v] = u
                heapq.heappush(heap, (nd, order[v], v))
    path = [c]
    while path[-1] != a:
        path.append(prev[path[-1]])
    return path[::-1]


def random_carc_fixture(rng):
    """Triangle a, b, c over the x-axis with barriers poking up through ac."""
    while True:
        w = rng.randint(8, 40)
        a, c = pt(0, 0), pt(w, 0)
        b = pt(rng.randint(-5, w + 5), rng.randint(4, 30))
        k = rng.randint(0, 4)
        xs = rng.sample(range(1, w), min(k, w - 1))
        segs = []
        for i, x in enumerate(sorted(xs)):
            top = Fraction(rng.randint(1, 29))
            bottom = pt(x + rng.randint(-3, 3), -rng.randint(1, 10))
            segs.append(Segment(i, bottom, Point(Fraction(x), top)))
        if any(crosses_properly(a, b, s.a, s.b) or crosses_properly(b, c, s.a, s.b) for s in segs):
            continue
        if any(not in_closed_triangle(s.b, a, b, c) for s in segs):
            continue
        pts = [a, b, c] + [p for s in segs for p in (s.a, s.b)]
        if len(set(pts)) != len(pts):
            continue
        if any(orient(p, q, r) == 0 for p, q, r in itertools.combinations(pts, 3)):
            continue
        if any(crosses_properly(s.a, s.b, t.a, t.b) for s, t in itertools.combinations(segs, 2)):
            continue
        return a, b, c, segs


def rng_for(seed):
    return random.Random(seed)


def visibility(s):
    """Endpoint pairs whose connecting segment crosses no segment properly."""
    pts = s.points()
    seen = set()
    for i, j in itertools.combinations(range(len(pts)), 2):
        if not any(crosses_properly(pts[i], pts[j], g.a, g.b) for g in s):
            seen.add((i, j))
            seen.add((j, i))
    return pts, seen


def _hull_ccw(points):
    hv = brute_hull_vertices(points)
    c = Point(sum(p.x for p in hv) / len(hv), sum(p.y for p in hv) / len(hv))
    return sorted(hv, key=lambda p: math.atan2(float(p.y - c.y), float(p.x - c.x)))


def _cyclic_subsequence(cycle, wanted):
    """True if ``wanted`` appears in ``cycle`` in this cyclic order."""
    pos = [cycle.index(p) for p in wanted]
    k = pos.index(min(pos))
    rot = pos[k:] + pos[:k]
    return rot == sorted(rot)


def three_slope_failures(s):
    """Structural checks on the nine-segment three-slope instance.

    Segment i holds s(i+1) = a(i+1) b(i+1). Returns the names of failed checks.
    """
    seg = {i + 1: s.seg(i) for i in range(9)}
    a = {i: g.a for i, g in seg.items()}
    b = {i: g.b for i, g in seg.items()}
    pts = [p for i in range(1, 10) for p in (a[i], b[i])]
    bad = []
    kinds = {"v" if g.a.x == g.b.x else (g.b.y - g.a.y) / (g.b.x - g.a.x) for g in seg.values()}
    if kinds != {0, 1, "v"}:
        bad.append("slopes")
    hull = _hull_ccw(pts)
    if set(hull) != {a[1], a[2], b[2], b[1]} or not _cyclic_subsequence(hull, [a[1], a[2], b[2], b[1]]):
        bad.append("hull")

    def xr(i):
        return min(a[i].x, b[i].x), max(a[i].x, b[i].x)

    if not (xr(4)[1] < xr(8)[0] and xr(8)[1] < xr(5)[0]):
        bad.append("s8 between s4 and s5")

    def blocked(p, q, i):
        return crosses_properly(p, q, a[i], b[i])

    # everything left of s5 reaches s6 and s9 only through s5, and the mirror for s4
    left5 = [p for p in pts if p.x < xr(5)[0]]
    right4 = [p for p in pts if p.x > xr(4)[1]]
    if not all(blocked(p, q, 5) for p in left5 for q in (a[6], b[6], a[9], b[9])):
        bad.append("s5 hides s6, s9")
    if not all(blocked(p, q, 4) for p in right4 for q in (a[3], b[3], a[7], b[7])):
        bad.append("s4 hides s3, s7")
    # s4 hides s8 from everything further left, and s5 from everything further right
    for i, side, wall in ((8, lambda p: p.x < xr(4)[0], 4), (8, lambda p: p.x > xr(5)[1], 5)):
        if not all(blocked(p, q, wall) for p in pts if side(p) for q in (a[i], b[i])):
            bad.append(f"s{wall} hides s8")
    # B holds b1, b2, s6, s9 and possibly b5; those five stay hull vertices in order
    for extra in ([], [b[5]]):
        cands = [b[1], b[2], a[6], b[6], a[9], b[9]] + extra
        hb = _hull_ccw(cands)
        ends9 = [p for p in (a[9], b[9]) if p in hb]
        if not ({b[1], b[2], a[6], b[6]} <= set(hb) and ends9):
            bad.append("conv(B) vertices")
            continue
        # an endpoint of s9 sits between a6 and b6, so a6 b6 is not a hull edge
        i6, j6 = sorted((hb.index(a[6]), hb.index(b[6])))
        between = hb[i6 + 1:j6]
        outside = hb[j6 + 1:] + hb[:i6]
        if not ((any(p in between for p in ends9) and b[1] in outside and b[2] in outside)
                or (any(p in outside for p in ends9) and b[1] in between and b[2] in between)):
            bad.append("s9 between a6 and b6")
    return bad


def closed_rays_meet(p, d, q, e):
    """Do the closed rays p + t d and q + s e (t, s >= 0) share a point?"""
    den = d.x * e.y - d.y * e.x
    wx, wy = q.x - p.x, q.y - p.y
    if den != 0:
        t = Fraction(wx * e.y - wy * e.x) / den
        s = Fraction(wx * d.y - wy * d.x) / den
        return t >= 0 and s >= 0
    if wx * d.y - wy * d.x != 0:
        return False  # parallel, different lines
    # same line: they meet unless they point away from each other
    dot_de = d.x * e.x + d.y * e.y
    along = wx * d.x + wy * d.y
    return dot_de > 0 or along >= 0


def _ray_hits(B, d, p, q):
    """Smallest t > 0 with B + t d on the closed segment pq, or None."""
    ex, ey = q.x - p.x, q.y - p.y
    den = d.x * ey - d.y * ex
    wx, wy = p.x - B.x, p.y - B.y
    if den == 0:
        if wx * d.y - wy * d.x != 0:
            return None
        dd = d.x * d.x + d.y * d.y
        ts = [Fraction((r.x - B.x) * d.x + (r.y - B.y) * d.y) / dd for r in (p, q)]
        ts = [t for t in ts if t > 0]
        return min(ts) if ts else None
    t = Fraction(wx * ey - wy * ex) / den
    u = Fraction(wx * d.y - wy * d.x) / den
    return t if t > 0 and 0 <= u <= 1 else None


def naive_escape(s, order, tails):
    """Reference route checker: list of extension ends, or the first failing id."""
    hull = _hull_ccw(s.points())
    hull_edges = list(zip(hull, hull[1:] + hull[:1]))
    exts = []
    for sid in order:
        g = s.seg(sid)
        B, A = (g.b, g.a) if tails[sid] == "b" else (g.a, g.b)
        if B in hull:
            exts.append((B, B))
            continue
        d = Point(B.x - A.x, B.y - A.y)
        seg_t = [t for o in s if o.id != sid for t in [_ray_hits(B, d, o.a, o.b)] if t is not None]
        stop_t = [t for p, q in exts + hull_edges if p != q
                  for t in [_ray_hits(B, d, p, q)] if t is not None]
        if seg_t and (not stop_t or min(seg_t) <= min(stop_t)):
            return sid
        t = min(stop_t)
        exts.append((B, Point(B.x + t * d.x, B.y + t * d.y)))
    return [q for _, q in exts]


def naive_ray_choice(s):
    """Exhaustive search for pairwise disjoint rays; returns the bit tuple."""
    ids = s.ids
    rays = {}
    for i in ids:
        g = s.seg(i)
        rays[i, True] = (g.a, Point(g.b.x - g.a.x, g.b.y - g.a.y))
        rays[i, False] = (g.b, Point(g.a.x - g.b.x, g.a.y - g.b.y))
    for bits in itertools.product((True, False), repeat=len(ids)):
        pick = [rays[i, b] for i, b in zip(ids, bits)]
        if not any(closed_rays_meet(*pick[x], *pick[y])
                   for x in range(len(ids)) for y in range(x + 1, len(ids))):
            return bits
    return None


def diode_failures(s):
    """Visibility checks for the diode: each pocket sees only its mouth, and
    the two cross pairs are blocked. Endpoint i of the file is d(i+1)."""
    out = []
    pts, seen = visibility(s)
    for pocket, allowed in (((4, 5), {2, 3, 6}), ((8, 9), {6, 10, 11})):
        for p in pocket:
            outside = {j for j in range(len(pts)) if (p, j) in seen and j not in pocket}
            if not outside <= allowed:
                out.append(f"d{p + 1} sees {sorted(j + 1 for j in outside - allowed)}")
    if (0, 2) in seen:
        out.append("d1 sees d3")
    if (1, 10) in seen:
        out.append("d2 sees d11")
    return out


CRITERIA = ["1", "2", "3", "4", "5", "6", "7", "7 slow", "8", "8 slow", "9"]
ACCEPTANCE = []  # (label, status, detail) filled in by the acceptance suite
