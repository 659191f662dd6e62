"""Subset selection: halving-line recursion and monotone-slope groups."""

from __future__ import annotations

import bisect
import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .geom import Segment
from .instance import SegmentSet, reflect_x


class Direction(enum.Enum):
    INCREASING = "increasing"
    DECREASING = "decreasing"


@dataclass
class TreeNode:
    level: int
    line: Fraction
    S: list  # ids crossing the line and no ancestor line
    Q: list = field(default_factory=list)  # monotone subset in y order along the line
    direction: Direction = Direction.DECREASING
    children: list = field(default_factory=list)

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()


@dataclass
class Selection:
    root: TreeNode
    level: int
    mu: list  # per-level total of |Q_v|
    stabbers: list  # l_1..l_r, working coordinates, left to right
    separators: list  # L_1..L_{r-1}
    groups: list  # Q_1..Q_r as id lists in increasing y along l_i
    subset: list  # ids of the selected segments
    reflected: bool
    inst: SegmentSet  # selected segments in working coordinates

    @property
    def r(self) -> int:
        return len(self.groups)

    @property
    def M(self) -> int:
        return max(self.mu)

    def dump(self) -> str:
        lines = [f"level={self.level} r={self.r} M={self.M} selected={len(self.subset)} "
                 f"reflected={'yes' if self.reflected else 'no'}"]
        lines.append("mu " + " ".join(str(m) for m in self.mu))
        for i, (c, g) in enumerate(zip(self.stabbers, self.groups), 1):
            lines.append(f"group {i} line x={c}: " + " ".join(str(s) for s in g))
        for i, c in enumerate(self.separators, 1):
            lines.append(f"separator {i} x={c}")
        return "\n".join(lines)


def _xrange(s: Segment) -> tuple[Fraction, Fraction]:
    return (min(s.a.x, s.b.x), max(s.a.x, s.b.x))


def halving_line(seg_ids: Sequence[int], s: SegmentSet) -> Fraction:
    """Most balanced vertical line between consecutive endpoint abscissae.

    Ties go to the leftmost gap.
    """
    if not seg_ids:
        raise ValueError("halving_line needs at least one segment")
    ranges = [_xrange(s.seg(i)) for i in seg_ids]
    n = len(ranges)
    xs = sorted({x for r in ranges for x in r})
    lo_sorted = sorted(r[0] for r in ranges)
    hi_sorted = sorted(r[1] for r in ranges)
    best = None
    for u, v in zip(xs, xs[1:]):
        c = (u + v) / 2
        left = bisect.bisect_left(hi_sorted, c)
        right = n - bisect.bisect_right(lo_sorted, c)
        if best is None or abs(left - right) < best[0]:
            best = (abs(left - right), c)
    assert best[0] <= 1  # left - right moves by at most one per gap, and changes sign
    return best[1]


def _y_at(s: Segment, c: Fraction) -> Fraction:
    return s.a.y + (s.b.y - s.a.y) * (c - s.a.x) / (s.b.x - s.a.x)


def slope(s: Segment) -> Fraction:
    return (s.b.y - s.a.y) / (s.b.x - s.a.x)


def _longest_increasing(vals: Sequence[Fraction]) -> list[int]:
    """Indices of a longest strictly increasing subsequence (patience sorting)."""
    tails: list[Fraction] = []
    tail_idx: list[int] = []
    prev = [-1] * len(vals)
    for i, v in enumerate(vals):
        k = bisect.bisect_left(tails, v)
        if k == len(tails):
            tails.append(v)
            tail_idx.append(i)
        else:
            tails[k] = v
            tail_idx[k] = i
        prev[i] = tail_idx[k - 1] if k > 0 else -1
    out = []
    i = tail_idx[-1] if tail_idx else -1
    while i >= 0:
        out.append(i)
        i = prev[i]
    return out[::-1]


def monotone_slope_subset(seg_ids: Sequence[int], line: Fraction, s: SegmentSet) -> tuple[list[int], Direction]:
    """Longest strictly monotone run of slopes in y order along the line."""
    order = sorted(seg_ids, key=lambda i: _y_at(s.seg(i), line))
    vals = [slope(s.seg(i)) for i in order]
    inc = _longest_increasing(vals)
    dec = _longest_increasing([-v for v in vals])
    if len(inc) > len(dec):
        return [order[i] for i in inc], Direction.INCREASING
    return [order[i] for i in dec], Direction.DECREASING


def build_tree(s: SegmentSet, ids: Optional[Sequence[int]] = None) -> TreeNode:
    ids = list(s.ids if ids is None else ids)

    def rec(group: list, level: int) -> TreeNode:
        c = halving_line(group, s)
        here, left, right = [], [], []
        for i in group:
            lo, hi = _xrange(s.seg(i))
            if hi < c:
                left.append(i)
            elif lo > c:
                right.append(i)
            else:
                here.append(i)
        node = TreeNode(level, c, here)
        node.Q, node.direction = monotone_slope_subset(here, c, s)
        for part in (left, right):
            if part:
                node.children.append(rec(part, level + 1))
        return node

    return rec(ids, 0)


def select_subset(s: SegmentSet) -> Selection:
    if len(s) < 2:
        raise ValueError("selection needs at least two segments")
    root = build_tree(s)
    nodes = list(root.walk())
    depth = max(v.level for v in nodes)
    mu = [0] * (depth + 1)
    for v in nodes:
        mu[v.level] += len(v.Q)
    level = mu.index(max(mu))
    # a line may stab nothing; such nodes contribute no group
    at = sorted((v for v in nodes if v.level == level and v.Q), key=lambda v: v.line)
    inc = [v for v in at if v.direction is Direction.INCREASING]
    dec = [v for v in at if v.direction is Direction.DECREASING]
    n_inc = sum(len(v.Q) for v in inc)
    n_dec = sum(len(v.Q) for v in dec)
    reflected = n_inc > n_dec
    chosen = inc if reflected else dec
    subset = sorted(i for v in chosen for i in v.Q)
    work = s.subset(subset)
    if reflected:
        work = work.transformed(reflect_x)
        chosen = list(reversed(chosen))
        stabbers = [-v.line for v in chosen]
    else:
        stabbers = [v.line for v in chosen]
    groups = []
    for v, c in zip(chosen, stabbers):
        groups.append(sorted(v.Q, key=lambda i: _y_at(work.seg(i), c)))
    separators = []
    for g1, g2 in zip(groups, groups[1:]):
        hi = max(x for i in g1 for x in _xrange(work.seg(i)))
        lo = min(x for i in g2 for x in _xrange(work.seg(i)))
        separators.append((hi + lo) / 2)
    return Selection(root, level, mu, stabbers, separators, groups, subset, reflected, work)
