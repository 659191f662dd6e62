"""Exponential ground-truth searches for small instances."""

from __future__ import annotations

import enum
import itertools
import time
from dataclasses import dataclass
from typing import Optional, Sequence

from .circumscribe import verify_circumscribing, verify_polygonization
from .geom import Point, convex_hull, crosses_properly
from .instance import Polygon, SegmentSet, VertexRef
from .rays import EscapeContext, EscapeOrder, Extend, RayChoice, TwoSatInstance, escape_check, rays_disjoint

CIRC_CAP = 7
ESCAPE_CAP = 9


class Verdict(enum.Enum):
    YES = "YES"
    NO = "NO"
    EXHAUSTED = "EXHAUSTED"


@dataclass(frozen=True)
class SearchBudget:
    nodes: int = 10 ** 8
    seconds: float = 600.0

    def __post_init__(self):
        if self.nodes <= 0 or self.seconds <= 0:
            raise ValueError("budget limits must be positive")


@dataclass
class OracleResult:
    verdict: Verdict
    witness: object = None
    nodes: int = 0

    def text(self) -> str:
        if self.verdict is Verdict.YES:
            w = self.witness
            line = " ".join(str(r) for r in w.cycle) if isinstance(w, Polygon) else w.text()
            return f"YES {line}"
        if self.verdict is Verdict.NO:
            return "NO"
        return f"EXHAUSTED {self.nodes}"


class _OutOfBudget(Exception):
    pass


class _Counter:
    def __init__(self, budget: SearchBudget):
        self.budget = budget
        self.nodes = 0
        self.deadline = time.monotonic() + budget.seconds

    def tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.budget.nodes:
            raise _OutOfBudget
        if self.nodes % 4096 == 0 and time.monotonic() > self.deadline:
            raise _OutOfBudget


def _inside_sweep(p: Point, nxt: Point, prv: Point, q: Point) -> bool:
    """Direction p->q strictly inside the ccw sweep from p->nxt to p->prv."""
    a = (nxt.x - p.x, nxt.y - p.y)
    b = (prv.x - p.x, prv.y - p.y)
    d = (q.x - p.x, q.y - p.y)

    def cr(u, v):
        return u[0] * v[1] - u[1] * v[0]

    if cr(a, b) > 0:
        return cr(a, d) > 0 and cr(d, b) > 0
    return not (cr(b, d) >= 0 and cr(d, a) >= 0)


def _polygon_search(s: SegmentSet, all_edges: bool, budget: SearchBudget) -> OracleResult:
    if len(s) < 2:
        return OracleResult(Verdict.NO)  # two points bound no simple polygon
    refs = sorted(s.refs(), key=lambda r: s.point(r))
    k = len(refs)
    pts = [s.point(r) for r in refs]
    idx = {r: i for i, r in enumerate(refs)}
    partner = [idx[r.partner()] for r in refs]
    hull = convex_hull(pts)
    hull_rank = {p: i for i, p in enumerate(hull)}  # ccw from the lowest-leftmost point
    rank = [hull_rank.get(p) for p in pts]
    start = rank.index(0)
    segs = list(s.segments)

    # candidate edges with their crossing sets as bitmasks
    eid: dict = {}
    ends: list = []
    for u in range(k):
        for v in range(u + 1, k):
            if not any(crosses_properly(pts[u], pts[v], g.a, g.b) for g in segs):
                eid[(u, v)] = eid[(v, u)] = len(ends)
                ends.append((u, v))
    crossing = [0] * len(ends)
    for i, (a, b) in enumerate(ends):
        for j in range(i + 1, len(ends)):
            c, d = ends[j]
            if len({a, b, c, d}) == 4 and crosses_properly(pts[a], pts[b], pts[c], pts[d]):
                crossing[i] |= 1 << j
                crossing[j] |= 1 << i
    nbrs = [[v for v in range(k) if (u, v) in eid] for u in range(k)]

    sweep: dict = {}

    def vertex_ok(v: int, prv: int, nxt: int) -> bool:
        q = partner[v]
        if q == prv or q == nxt:
            return True
        if all_edges:
            return False
        key = (v, prv, nxt)
        if key not in sweep:
            sweep[key] = _inside_sweep(pts[v], pts[nxt], pts[prv], pts[q])
        return sweep[key]

    counter = _Counter(budget)
    path = [start]
    used = [False] * k
    used[start] = True
    state = {"placed": 0, "last_hull": 0}

    def free(u: int, v: int) -> bool:
        e = eid.get((u, v))
        return e is not None and not (crossing[e] & state["placed"])

    def feasible(u: int) -> bool:
        """Every unvisited point still has two usable neighbours."""
        for w in range(k):
            if used[w]:
                continue
            cnt = 0
            for x in nbrs[w]:
                if (not used[x] or x == u or x == start) and free(w, x):
                    cnt += 1
                    if cnt == 2:
                        break
            if cnt < 2:
                return False
        return True

    def rec() -> bool:
        counter.tick()
        u = path[-1]
        if len(path) == k:
            return (free(u, start) and vertex_ok(u, path[-2], start)
                    and vertex_ok(start, u, path[1]))
        if not feasible(u):
            return False
        if all_edges and u != start and not used[partner[u]]:
            cands = [partner[u]]  # the segment at u must be the next edge
        else:
            cands = [v for v in nbrs[u] if not used[v]]
        last_hull = state["last_hull"]
        for v in cands:
            h = rank[v]
            if h is not None and h != last_hull + 1:
                continue  # hull vertices appear in ccw hull order
            if not free(u, v):
                continue
            if len(path) >= 2 and not vertex_ok(u, path[-2], v):
                continue
            e = eid[(u, v)]
            placed = state["placed"]
            path.append(v)
            used[v] = True
            state["placed"] = placed | (1 << e)
            if h is not None:
                state["last_hull"] = h
            if rec():
                return True
            path.pop()
            used[v] = False
            state["placed"] = placed
            state["last_hull"] = last_hull
        return False

    try:
        found = rec()
    except _OutOfBudget:
        return OracleResult(Verdict.EXHAUSTED, None, counter.nodes)
    if not found:
        return OracleResult(Verdict.NO, None, counter.nodes)
    poly = Polygon(tuple(refs[i] for i in path), tuple(s.ids))
    rep = verify_polygonization(poly, s) if all_edges else verify_circumscribing(poly, s, s.ids)
    if not rep.ok:
        raise AssertionError(f"oracle witness failed verification: {rep}")
    return OracleResult(Verdict.YES, poly, counter.nodes)


def oracle_circumscribing(s: SegmentSet, budget: SearchBudget = SearchBudget(), cap: int = CIRC_CAP) -> OracleResult:
    if len(s) > cap:
        raise ValueError(f"instance has {len(s)} segments, cap is {cap}")
    return _polygon_search(s, False, budget)


def oracle_polygonization(s: SegmentSet, budget: SearchBudget = SearchBudget(), cap: int = CIRC_CAP) -> OracleResult:
    if len(s) > cap:
        raise ValueError(f"instance has {len(s)} segments, cap is {cap}")
    return _polygon_search(s, True, budget)


# ------------------------------------------------------------------ escape routes

def _escape_search(sub: SegmentSet, counter: _Counter) -> Optional[EscapeOrder]:
    ctx = EscapeContext(sub)
    ids = sub.ids
    dead: set = set()
    order: list = []
    tails: dict = {}
    exts: list = []
    placed: list = []

    def rec() -> bool:
        counter.tick()
        if len(order) == len(ids):
            return True
        key = frozenset(placed)
        if key in dead:
            return False
        for sid in ids:
            if sid in tails:
                continue
            for tail in ("b", "a"):
                end = ctx.shoot(sid, tail, exts)
                if end is None:
                    continue
                start = ctx.tail_head(sid, tail)[0]
                order.append(sid)
                tails[sid] = tail
                exts.append((start, end))
                placed.append((sid, tail, end))
                if rec():
                    return True
                order.pop()
                del tails[sid]
                exts.pop()
                placed.pop()
        dead.add(key)
        return False

    if not rec():
        return None
    return escape_check(sub, order, tails)


def oracle_escape_route(s: SegmentSet, subset: Optional[Sequence[int]] = None,
                        budget: SearchBudget = SearchBudget(), cap: int = ESCAPE_CAP) -> OracleResult:
    ids = list(s.ids if subset is None else subset)
    if len(ids) > cap:
        raise ValueError(f"subset has {len(ids)} segments, cap is {cap}")
    counter = _Counter(budget)
    sub = s.subset(ids)
    try:
        e = _escape_search(sub, counter)
    except _OutOfBudget:
        return OracleResult(Verdict.EXHAUSTED, None, counter.nodes)
    if e is None:
        return OracleResult(Verdict.NO, None, counter.nodes)
    return OracleResult(Verdict.YES, e, counter.nodes)


@dataclass
class MaxEscape:
    size: int
    subset: list
    witness: Optional[EscapeOrder]
    verdict: Verdict  # EXHAUSTED if the search ran out before a maximum was certified
    nodes: int = 0


def oracle_max_escape_subset(s: SegmentSet, budget: SearchBudget = SearchBudget(),
                             cap: int = ESCAPE_CAP) -> MaxEscape:
    if len(s) > cap:
        raise ValueError(f"instance has {len(s)} segments, cap is {cap}")
    counter = _Counter(budget)
    try:
        for size in range(len(s), 0, -1):
            for combo in itertools.combinations(s.ids, size):
                sub = s.subset(combo)
                e = _escape_search(sub, counter)
                if e is not None:
                    return MaxEscape(size, list(combo), e, Verdict.YES, counter.nodes)
    except _OutOfBudget:
        return MaxEscape(0, [], None, Verdict.EXHAUSTED, counter.nodes)
    return MaxEscape(0, [], None, Verdict.NO, counter.nodes)


# ------------------------------------------------------------------ truth tables

def two_sat_brute(t: TwoSatInstance) -> Optional[list[bool]]:
    for bits in itertools.product((False, True), repeat=t.n_vars):
        if t.satisfied_by(bits):
            return list(bits)
    return None


def rays_brute(s: SegmentSet) -> Optional[RayChoice]:
    ids = s.ids
    for bits in itertools.product((Extend.PAST_B, Extend.PAST_A), repeat=len(ids)):
        rc = RayChoice(dict(zip(ids, bits)))
        if rays_disjoint(s, rc):
            return rc
    return None


def escape_brute(s: SegmentSet) -> Optional[EscapeOrder]:
    """Try every order and orientation; independent of the pruned search."""
    ids = s.ids
    for perm in itertools.permutations(ids):
        for tails in itertools.product("ab", repeat=len(ids)):
            e = escape_check(s, perm, dict(zip(perm, tails)))
            if e is not None:
                return e
    return None


def polygon_brute(s: SegmentSet, all_edges: bool) -> Optional[Polygon]:
    """Permutation enumeration over all endpoint cycles (tiny n only)."""
    refs = s.refs()
    first, rest = refs[0], refs[1:]
    for perm in itertools.permutations(rest):
        poly = Polygon((first,) + perm, tuple(s.ids))
        rep = verify_polygonization(poly, s) if all_edges else verify_circumscribing(poly, s, s.ids)
        if rep.ok:
            return poly
    return None
