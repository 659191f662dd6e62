import itertools
import math
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from circpoly.circumscribe import (
    PHASE_FLAGS, TooFewSelected, circumscribe, contiguity_report, half_visited, plan_phase2,
    verify_circumscribing, verify_polygonization,
)
from circpoly.frame import LineContext, check_invariants, init_hull_frame
from circpoly.geom import is_simple_polygon, signed_area2
from circpoly.instance import (
    Polygon, SegmentSet, VertexRef, gen_parallel_chords, gen_random, parse_instance, write_instance,
    validate_general_position, write_polygon,
)
from circpoly.select import select_subset


def sset(*rows):
    return SegmentSet.from_coords(rows)


def poly(*tokens, subset=()):
    return Polygon(tuple(VertexRef.parse(t) for t in tokens), tuple(subset))


class TestVerifiers:
    def test_diagonal_inside(self):
        # quadrilateral around two segments, one of them a diagonal
        s = sset((0, 0, 10, 1), (3, -5, 4, 6))
        p = poly("1.a", "0.b", "1.b", "0.a", subset=(0, 1))
        assert verify_circumscribing(p, s, [0, 1]).ok

    def test_missing_endpoint(self):
        s = sset((0, 0, 10, 1), (3, -5, 4, 6), (20, 20, 21, 25))
        p = poly("1.a", "0.b", "1.b", "0.a", subset=(0, 1))
        assert not verify_circumscribing(p, s, [0, 1, 2]).ok

    def test_external_diagonal(self):
        # a dent makes segment 1 run outside the polygon
        s = sset((0, 0, 10, 0), (2, 5, 8, 5), (5, 1, 6, 9))
        p = poly("0.a", "0.b", "1.b", "2.a", "1.a", "2.b", subset=(0, 1, 2))
        rep = verify_circumscribing(p, s, [0, 1, 2])
        assert not rep.ok

    def test_not_simple(self):
        s = sset((0, 0, 10, 1), (3, -5, 4, 6))
        p = poly("0.a", "0.b", "1.a", "1.b", subset=(0, 1))
        assert not is_simple_polygon([s.point(r) for r in p.cycle])
        assert not verify_circumscribing(p, s, [0, 1]).ok

    def test_polygonization(self):
        s = sset((0, 0, 1, 0), (0, 3, 1, 4))
        p = poly("0.a", "0.b", "1.b", "1.a", subset=(0, 1))
        assert verify_polygonization(p, s).ok
        # the diagonal version circumscribes but is no polygonization
        s2 = sset((0, 0, 10, 1), (3, -5, 4, 6))
        q = poly("1.a", "0.b", "1.b", "0.a", subset=(0, 1))
        assert verify_circumscribing(q, s2, [0, 1]).ok
        assert not verify_polygonization(q, s2).ok

    def test_chords_never_polygonize(self):
        s = gen_parallel_chords(3)
        refs = s.refs()
        for perm in itertools.permutations(refs[1:]):
            assert not verify_polygonization(Polygon((refs[0],) + perm, tuple(s.ids)), s).ok


class TestPipeline:
    def test_single_group_visits_everything(self):
        # slopes decrease upward along one vertical line; one endpoint starts hidden
        s = sset((-1, -3, 1, 3), (-2, 8, 2, 12), (-3, 24, 3, 18))
        assert validate_general_position(s).ok
        res = circumscribe(s)
        assert res.op_counts.get("build_cap") == 1
        assert res.subset == [0, 1, 2]
        assert verify_circumscribing(res.polygon, s, res.subset).ok

    def test_hull_already_complete(self):
        s = sset((-1, 0, 2, 1), (-2, 10, 3, 6))
        res = circumscribe(s)
        assert res.op_counts.get("build_cap", 0) == 0 and res.op_counts.get("dip", 0) == 0
        assert set(res.polygon.cycle) == set(init_hull_frame(s).cycle)

    def test_too_few(self):
        with pytest.raises(TooFewSelected):
            circumscribe(gen_parallel_chords(5))

    def test_random_64(self):
        s = gen_random(64, 0)
        res = circumscribe(s)
        assert len(res.subset) >= math.ceil(len(res.selected) / 4) >= 1
        assert 16 * len(res.selected) ** 2 >= 64
        assert verify_circumscribing(res.polygon, s, res.subset).ok

    def test_deterministic_output(self):
        s = gen_random(40, 5)
        a = circumscribe(s)
        b = circumscribe(parse_instance(write_instance(s)))
        assert write_polygon(a.polygon, len(a.selected), 40) == write_polygon(b.polygon, len(b.selected), 40)

    def test_polygon_is_ccw_in_input_coordinates(self):
        s = gen_random(30, 3)
        res = circumscribe(s)
        assert signed_area2([s.point(r) for r in res.polygon.cycle]) > 0

    @given(st.integers(2, 48), st.integers(0, 10 ** 5))
    @settings(max_examples=30, deadline=None)
    def test_guarantees(self, n, seed):
        s = gen_random(n, seed)
        try:
            res = circumscribe(s)
        except TooFewSelected:
            assert len(select_subset(s).subset) < 2
            return
        s1, s2 = len(res.selected), len(res.subset)
        assert 16 * s1 * s1 >= n
        assert 4 * s2 >= s1
        assert set(res.subset) <= set(res.selected)
        assert verify_circumscribing(res.polygon, s, res.subset).ok
        verts = Counter(r.seg for r in res.polygon.cycle)
        assert all(verts[i] == 2 for i in res.subset)

    @given(st.integers(4, 40), st.integers(0, 10 ** 5))
    @settings(max_examples=20, deadline=None)
    def test_phase_boundaries(self, n, seed):
        s = gen_random(n, seed)
        try:
            res = circumscribe(s)
        except TooFewSelected:
            return
        sel = res.selection
        ctx = LineContext(list(sel.separators), list(sel.stabbers))
        f1 = res.frames[1]
        assert check_invariants(f1, PHASE_FLAGS[1], ctx).ok
        assert contiguity_report(f1, sel.groups).ok
        plan = plan_phase2(f1.copy(), sel)
        ctx.protected = plan.protected
        assert check_invariants(res.frames[2], PHASE_FLAGS[2], ctx).ok
        assert check_invariants(res.frames[3], PHASE_FLAGS[3], ctx).ok
        assert half_visited(res.frames[3]) == []
        # phase 4 keeps the vertex set
        assert res.frames[4].vertex_set() == res.frames[3].vertex_set()

