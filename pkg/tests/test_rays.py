import itertools

import pytest
from hypothesis import given, settings, strategies as st

from circpoly.circumscribe import verify_circumscribing
from circpoly.frame import InvariantBreach
from circpoly.geom import Point, PreconditionViolated
from circpoly.instance import (
    SegmentSet, gen_parallel_chords, gen_random, load_golden, validate_general_position,
)
from circpoly.oracle import Verdict, escape_brute, oracle_escape_route
from circpoly.rays import (
    EscapeOrder, Extend, RayChoice, TwoSatInstance, build_extension_clauses, escape_check,
    escape_polygon, escape_report, ray_extensible, rays_disjoint, rays_meet, rays_to_escape_order,
    two_sat_conflict, two_sat_solve,
)

from helpers import closed_rays_meet, naive_escape, naive_ray_choice


def sset(*rows):
    return SegmentSet.from_coords(rows)


def truth_table_sat(t):
    return any(all(bits[v1] == b1 or bits[v2] == b2 for (v1, b1), (v2, b2) in t.clauses)
               for bits in itertools.product((False, True), repeat=t.n_vars))


# three radial segments around the origin
OUTWARD = sset((1, 0, 5, 1), (-1, 2, -3, 9), (-2, -1, -5, -6))


class TestTwoSat:
    def test_forced_true(self):
        t = TwoSatInstance(2)
        t.add((0, True), (1, True))
        t.add((0, False), (1, True))
        sol = two_sat_solve(t)
        assert sol is not None and sol[1] is True

    def test_contradiction(self):
        t = TwoSatInstance(1)
        t.add((0, True), (0, True))
        t.add((0, False), (0, False))
        assert two_sat_solve(t) is None
        assert two_sat_conflict(t) == 0

    def test_empty(self):
        assert two_sat_solve(TwoSatInstance(3)) is not None
        assert two_sat_solve(TwoSatInstance(0)) == []

    @given(st.integers(1, 12), st.data())
    @settings(max_examples=300, deadline=None)
    def test_against_truth_table(self, n, data):
        lit = st.tuples(st.integers(0, n - 1), st.booleans())
        clauses = data.draw(st.lists(st.tuples(lit, lit), max_size=3 * n))
        t = TwoSatInstance(n, list(clauses))
        sol = two_sat_solve(t)
        assert (sol is not None) == truth_table_sat(t)
        if sol is not None:
            assert t.satisfied_by(sol)
        assert (two_sat_conflict(t) is None) == (sol is not None)


small = st.integers(-4, 4)
vec = st.tuples(small, small).filter(lambda v: v != (0, 0))


class TestRays:
    @given(st.tuples(small, small), vec, st.tuples(small, small), vec)
    @settings(max_examples=500, deadline=None)
    def test_meet_matches_reference(self, p, d, q, e):
        args = [Point(*v) for v in (p, d, q, e)]
        assert rays_meet(*args) == closed_rays_meet(*args)

    def test_meet_collinear_cases(self):
        o, x = Point(0, 0), Point(1, 0)
        assert rays_meet(o, x, Point(5, 0), Point(-1, 0))  # facing each other
        assert not rays_meet(o, Point(-1, 0), Point(5, 0), x)  # back to back
        assert rays_meet(o, x, Point(5, 0), x)  # nested
        assert not rays_meet(o, x, Point(0, 1), x)  # parallel lines

    def test_parallel_segments_have_no_clauses(self):
        s = sset((0, 0, 1, 3), (5, 1, 6, 4))
        assert build_extension_clauses(s).clauses == []
        assert ray_extensible(s) is not None

    def test_clauses_match_pairwise_tests(self):
        # segment 0 aims at the body of segment 1 in one direction
        s = sset((0, 0, 2, 1), (6, -3, 7, 9), (-5, 4, -4, 11))
        t = build_extension_clauses(s)
        forbidden = {((v1, not b1), (v2, not b2)) for (v1, b1), (v2, b2) in t.clauses}
        expect = set()
        for x, y in itertools.combinations(range(3), 2):
            for bx, by in itertools.product((True, False), repeat=2):
                rx = RayChoice({x: Extend.PAST_B if bx else Extend.PAST_A}).ray(s, x)
                ry = RayChoice({y: Extend.PAST_B if by else Extend.PAST_A}).ray(s, y)
                if closed_rays_meet(*rx, *ry):
                    expect.add(((x, bx), (y, by)))
        assert forbidden == expect
        assert ((0, True), (1, True)) in forbidden and ((0, True), (1, False)) in forbidden

    def test_outward(self):
        rc = ray_extensible(OUTWARD)
        assert rc is not None and rc.text() == "+++"

    def test_parallel_chords_extend_the_same_way(self):
        s = gen_parallel_chords(4)
        rc = ray_extensible(s)
        assert rc is not None and len(set(rc.choice.values())) == 1
        assert rays_disjoint(s, rc)

    def test_escape_demo_not_extensible(self):
        s = load_golden("escape_demo.seg")
        assert ray_extensible(s) is None
        assert naive_ray_choice(s) is None

    @given(st.integers(2, 10), st.integers(0, 10 ** 6))
    @settings(max_examples=40, deadline=None)
    def test_against_exhaustive(self, n, seed):
        s = gen_random(n, seed)
        rc = ray_extensible(s)
        assert (rc is None) == (naive_ray_choice(s) is None)
        if rc is not None:
            rays = [rc.ray(s, i) for i in s.ids]
            assert not any(closed_rays_meet(*r1, *r2) for r1, r2 in itertools.combinations(rays, 2))

    def test_choice_text_round_trip(self):
        rc = RayChoice({0: Extend.PAST_B, 1: Extend.PAST_A, 2: Extend.PAST_A})
        assert RayChoice.parse(rc.text(), [0, 1, 2]) == rc
        with pytest.raises(ValueError):
            RayChoice.parse("+x", [0, 1])


class TestEscape:
    def test_aimed_into_a_segment(self):
        s = sset((0, 0, 2, 1), (6, -3, 7, 9), (-5, 4, -4, 11))
        rep = escape_report(s, [0, 1, 2], {0: "b", 1: "a", 2: "a"})
        assert not rep.ok and rep.failed == 0
        assert naive_escape(s, [0, 1, 2], {0: "b", 1: "a", 2: "a"}) == 0

    def test_order_text_round_trip(self):
        e = EscapeOrder.parse("2:a 0:b 1:a")
        assert e.order == [2, 0, 1] and e.text() == "2:a 0:b 1:a"
        with pytest.raises(ValueError):
            EscapeOrder.parse("1:a 1:b")
        with pytest.raises(ValueError):
            EscapeOrder.parse("1:c")

    def test_bad_order(self):
        with pytest.raises(ValueError):
            escape_report(OUTWARD, [0, 0], {0: "a"})

    @given(st.integers(2, 6), st.integers(0, 10 ** 6), st.randoms(use_true_random=False))
    @settings(max_examples=60, deadline=None)
    def test_against_reference(self, n, seed, rnd):
        s = gen_random(n, seed)
        order = s.ids[:]
        rnd.shuffle(order)
        tails = {i: rnd.choice("ab") for i in order}
        ref = naive_escape(s, order, tails)
        e = escape_check(s, order, tails)
        if isinstance(ref, int):
            assert e is None and escape_report(s, order, tails).failed == ref
        else:
            assert e is not None
            assert [e.extension_end[i] for i in order] == ref

    def test_rays_give_routes(self):
        s = gen_parallel_chords(4)
        e = rays_to_escape_order(s, ray_extensible(s))
        assert e.order == s.ids
        assert naive_escape(s, e.order, e.tail) == [e.extension_end[i] for i in e.order]

    @given(st.integers(2, 8), st.integers(0, 10 ** 6))
    @settings(max_examples=40, deadline=None)
    def test_extensible_implies_route(self, n, seed):
        s = gen_random(n, seed)
        rc = ray_extensible(s)
        if rc is None:
            return
        e = rays_to_escape_order(s, rc)
        assert isinstance(naive_escape(s, e.order, e.tail), list)
        poly = escape_polygon(s, e)
        assert verify_circumscribing(poly, s, s.ids).ok
        assert sorted(poly.cycle) == sorted(s.refs())

    def test_escape_demo_route(self):
        s = load_golden("escape_demo.seg")
        res = oracle_escape_route(s)
        assert res.verdict is Verdict.YES
        e = res.witness
        assert isinstance(naive_escape(s, e.order, e.tail), list)
        assert escape_brute(s) is not None
        assert verify_circumscribing(escape_polygon(s, e), s, s.ids).ok


class TestEscapePolygon:
    def test_two_segments(self):
        s = sset((0, 0, 1, 3), (5, 1, 7, 2))
        e = escape_check(s, [0, 1], {0: "b", 1: "b"})
        poly = escape_polygon(s, e)
        assert len(poly.cycle) == 4 and verify_circumscribing(poly, s, s.ids).ok

    def test_needs_every_segment(self):
        s = sset((0, 0, 1, 3), (5, 1, 7, 2))
        with pytest.raises(PreconditionViolated):
            escape_polygon(s, escape_check(s, [0], {0: "b"}))

    def test_rejects_failing_order(self):
        s = sset((0, 0, 2, 1), (6, -3, 7, 9), (-5, 4, -4, 11))
        with pytest.raises(PreconditionViolated):
            escape_polygon(s, EscapeOrder([0, 1, 2], {0: "b", 1: "a", 2: "a"}))

    @given(st.integers(2, 5), st.integers(0, 10 ** 6))
    @settings(max_examples=40, deadline=None)
    def test_oracle_routes(self, n, seed):
        s = gen_random(n, seed)
        res = oracle_escape_route(s)
        if res.verdict is not Verdict.YES:
            return
        try:
            poly = escape_polygon(s, res.witness)
        except InvariantBreach as err:  # reported with its bundle on failure
            pytest.fail(f"{err}")
        assert verify_circumscribing(poly, s, s.ids).ok


def test_fixtures_in_general_position():
    assert validate_general_position(OUTWARD).ok
    assert validate_general_position(sset((0, 0, 2, 1), (6, -3, 7, 9), (-5, 4, -4, 11))).ok
