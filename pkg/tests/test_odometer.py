"""
Tests for adding-machine points, translation, distance and first-hit times.
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dynamics.errors import UsageError
from dynamics.odometer import (
    Cylinder,
    ExactPoint,
    NotFoundWithinHorizon,
    OrbitRelation,
    SampledPoint,
    UltraDistance,
    ball_to_cylinder,
    depth_for_radius,
    derive_seed,
    distance,
    first_hit,
    first_hit_bruteforce,
    format_point,
    orbit_visits_each_cylinder,
    parse_point,
    point_from_residue,
    predecessor,
    regular_recurrence_period,
    same_orbit,
    successor,
    translate,
    verify_cyclic_partition,
    zero_point,
)
from dynamics.radix import RadixSpec, modulus
from tests.strategies import depths_within, exact_points

SPECS = [
    RadixSpec.constant(2),
    RadixSpec(period=(2, 3)),
    RadixSpec.constant(10),
    RadixSpec(preperiod=(2, 3), period=(4,)),
]

POINT_TEXTS = ["digits:|0", "digits:|max", "digits:1|0", "digits:1,0", "digits:0,1|1,0,0", "digits:|1"]

ALL_SPECS = SPECS + [RadixSpec.factorial(), RadixSpec.primes()]


class TestPointSyntax:
    @pytest.mark.unit
    def test_canonical_form(self, dyadic):
        x = parse_point("digits:1,0,1,0|1,0", dyadic)
        assert format_point(x) == "digits:|1,0"

    @pytest.mark.unit
    def test_trailing_zeros_fold_into_tail(self, dyadic):
        assert format_point(parse_point("digits:1,0,0|0", dyadic)) == "digits:1|0"

    @pytest.mark.unit
    def test_equal_points_hash_alike(self, dyadic):
        a = parse_point("digits:0,0|0", dyadic)
        b = zero_point(dyadic)
        assert a == b
        assert hash(a) == hash(b)

    @pytest.mark.unit
    def test_max_tail_matches_explicit_digits(self, dyadic):
        assert parse_point("digits:|1", dyadic) == parse_point("digits:|max", dyadic)

    @pytest.mark.unit
    def test_seed_points(self, dyadic):
        x = parse_point("seed:42", dyadic)
        assert isinstance(x, SampledPoint)
        assert format_point(x) == "seed:42"

    @pytest.mark.unit
    @pytest.mark.parametrize("text", ["1,0", "digits:2", "digits:max|0", "seed:abc", "bits:1|0", "digits:1|"])
    def test_rejects_malformed(self, dyadic, text):
        with pytest.raises(UsageError):
            parse_point(text, dyadic)


class TestTranslation:
    @pytest.mark.unit
    def test_successor_of_zero(self, dyadic):
        assert format_point(successor(zero_point(dyadic))) == "digits:1|0"

    @pytest.mark.unit
    def test_predecessor_of_zero_is_all_max(self, dyadic):
        assert format_point(predecessor(zero_point(dyadic))) == "digits:|max"

    @pytest.mark.unit
    def test_factorial_wraps_through_max_tail(self):
        spec = RadixSpec.factorial()
        minus_one = predecessor(zero_point(spec))
        assert minus_one.digits(4) == (1, 2, 3, 4)
        assert successor(minus_one) == zero_point(spec)

    @pytest.mark.unit
    def test_translate_carries_into_tail(self, dyadic):
        x = parse_point("digits:1,0", dyadic)
        assert successor(x).digits(6) == (0, 1, 1, 0, 1, 0)

    @pytest.mark.unit
    def test_sampled_points_cannot_translate(self, dyadic):
        with pytest.raises(UsageError):
            translate(SampledPoint(dyadic, 1), 1)

    @given(spec=st.sampled_from(SPECS), text=st.sampled_from(POINT_TEXTS), k=st.integers(-40, 40))
    @settings(max_examples=200, deadline=None)
    def test_translate_round_trip(self, spec, text, k):
        x = parse_point(text, spec)
        assert translate(translate(x, k), -k) == x

    @given(spec=st.sampled_from(SPECS), text=st.sampled_from(POINT_TEXTS), k=st.integers(-40, 40))
    @settings(max_examples=200, deadline=None)
    def test_same_orbit_recovers_offset(self, spec, text, k):
        x = parse_point(text, spec)
        assert same_orbit(x, translate(x, k)) == OrbitRelation(True, k)

    @given(spec=st.sampled_from(SPECS), depth=st.integers(0, 5), data=st.data())
    @settings(max_examples=100, deadline=None)
    def test_translation_acts_on_residues(self, spec, depth, data):
        m = modulus(spec, depth)
        r = data.draw(st.integers(0, m - 1))
        k = data.draw(st.integers(-3 * m, 3 * m))
        x = point_from_residue(spec, r, depth)
        assert translate(x, k).residue(depth) == (r + k) % m

    @given(spec=st.sampled_from(SPECS), data=st.data(), a=st.integers(-60, 60), b=st.integers(-60, 60))
    @settings(max_examples=200, deadline=None)
    def test_translations_compose(self, spec, data, a, b):
        x = data.draw(exact_points(spec))
        assert translate(translate(x, a), b) == translate(x, a + b)

    @given(spec=st.sampled_from(SPECS), depth=st.integers(0, 5), data=st.data())
    @settings(max_examples=100, deadline=None)
    def test_translation_by_modulus_fixes_cylinder(self, spec, depth, data):
        x = data.draw(exact_points(spec))
        m = modulus(spec, depth)
        assert translate(x, m).digits(depth) == x.digits(depth)
        assert translate(x, -m).digits(depth) == x.digits(depth)


class TestOrbits:
    @pytest.mark.unit
    def test_same_orbit_positive_offset(self, dyadic):
        assert same_orbit(zero_point(dyadic), point_from_residue(dyadic, 5, 3)) == OrbitRelation(True, 5)

    @pytest.mark.unit
    def test_same_orbit_negative_offset(self, dyadic):
        minus_one = parse_point("digits:|max", dyadic)
        assert same_orbit(zero_point(dyadic), minus_one) == OrbitRelation(True, -1)

    @pytest.mark.unit
    def test_distinct_orbits(self, dyadic):
        # 1,0,1,0,... is -1/3, not an integer translate of 0
        alternating = parse_point("digits:1,0", dyadic)
        assert not same_orbit(zero_point(dyadic), alternating).same

    @pytest.mark.unit
    @pytest.mark.parametrize("spec", SPECS + [RadixSpec.factorial(), RadixSpec.primes()])
    @pytest.mark.parametrize("i", [1, 2, 3, 4])
    def test_cyclic_partition(self, spec, i):
        assert verify_cyclic_partition(spec, i)

    @pytest.mark.slow
    @pytest.mark.parametrize("spec", SPECS)
    def test_cyclic_partition_deep(self, spec):
        assert all(verify_cyclic_partition(spec, i) for i in range(1, 7))

    @pytest.mark.unit
    def test_minimality_at_finite_depth(self, dyadic):
        x = parse_point("digits:1,0", dyadic)
        assert orbit_visits_each_cylinder(x, 5)
        assert orbit_visits_each_cylinder(x, 5, backward=True)

    @pytest.mark.slow
    @pytest.mark.parametrize("spec", ALL_SPECS, ids=str)
    def test_orbits_equidistribute(self, spec):
        for depth in depths_within(spec, 4096):
            m = modulus(spec, depth)
            for r in sorted({0, m // 3, m - 1}):
                x = point_from_residue(spec, r, depth)
                assert orbit_visits_each_cylinder(x, depth)
                assert orbit_visits_each_cylinder(x, depth, backward=True)

    @pytest.mark.unit
    def test_regular_recurrence(self):
        spec = RadixSpec(preperiod=(2, 3), period=(4,))
        x = point_from_residue(spec, 7, 3)
        assert regular_recurrence_period(x, 3) == 24


class TestDistance:
    @pytest.mark.unit
    def test_first_differing_digit(self, dyadic):
        d = distance(zero_point(dyadic), point_from_residue(dyadic, 4, 3))
        assert d == UltraDistance(UltraDistance.EXACT, 3)
        assert d.value == Fraction(1, 8)

    @pytest.mark.unit
    def test_zero_distance(self, dyadic):
        d = distance(parse_point("digits:|1", dyadic), parse_point("digits:|max", dyadic))
        assert d.kind == UltraDistance.ZERO
        assert d.value == 0

    @pytest.mark.unit
    def test_sampled_points(self, dyadic):
        assert distance(SampledPoint(dyadic, 3), SampledPoint(dyadic, 3)).kind == UltraDistance.ZERO
        x = SampledPoint(dyadic, 3)
        y = ExactPoint(dyadic, x.digits(80), (0,))
        d = distance(x, y, depth_cap=64)
        assert d == UltraDistance(UltraDistance.BELOW, 64)
        assert d.value is None

    @pytest.mark.unit
    def test_other_machine(self, dyadic):
        with pytest.raises(UsageError):
            distance(zero_point(dyadic), zero_point(RadixSpec.constant(3)))

    @given(spec=st.sampled_from(SPECS), a=st.sampled_from(POINT_TEXTS), b=st.sampled_from(POINT_TEXTS))
    @settings(max_examples=100, deadline=None)
    def test_translation_is_an_isometry(self, spec, a, b):
        x, y = parse_point(a, spec), parse_point(b, spec)
        assert distance(successor(x), successor(y)) == distance(x, y)

    @pytest.mark.slow
    @given(spec=st.sampled_from(SPECS), data=st.data(), k=st.integers(-500, 500))
    @settings(max_examples=1000, deadline=None)
    def test_isometry_on_random_pairs(self, spec, data, k):
        x = data.draw(exact_points(spec))
        y = data.draw(exact_points(spec))
        assert distance(successor(x), successor(y)) == distance(x, y)
        assert distance(translate(x, k), translate(y, k)) == distance(x, y)


class TestBalls:
    @pytest.mark.unit
    @pytest.mark.parametrize(
        "rho,depth",
        [(2, 0), (1, 0), (Fraction(3, 4), 0), (Fraction(1, 2), 1), (Fraction(3, 8), 1), (Fraction(1, 4), 2)],
    )
    def test_depth_for_radius(self, rho, depth):
        assert depth_for_radius(rho) == depth

    @pytest.mark.unit
    def test_nonpositive_radius(self):
        with pytest.raises(UsageError):
            depth_for_radius(0)

    @pytest.mark.unit
    def test_ball_is_cylinder(self, dyadic):
        c = ball_to_cylinder(parse_point("digits:1,0", dyadic), Fraction(1, 8))
        assert c == Cylinder(dyadic, 3, 5)

    @pytest.mark.unit
    def test_cylinder_intersection(self, dyadic):
        assert Cylinder(dyadic, 1, 1).intersects(Cylinder(dyadic, 3, 5))
        assert not Cylinder(dyadic, 1, 1).intersects(Cylinder(dyadic, 3, 4))

    @given(
        spec=st.sampled_from(SPECS),
        data=st.data(),
        small=st.fractions(min_value=Fraction(1, 1024), max_value=2),
        large=st.fractions(min_value=Fraction(1, 1024), max_value=2),
    )
    @settings(max_examples=200, deadline=None)
    def test_smaller_radius_smaller_cylinder(self, spec, data, small, large):
        small, large = sorted((small, large))
        center = data.draw(exact_points(spec))
        inner, outer = ball_to_cylinder(center, small), ball_to_cylinder(center, large)
        assert inner.depth >= outer.depth
        assert inner.residue % outer.modulus == outer.residue
        for s in range(min(inner.modulus, 64)):
            member = translate(point_from_residue(spec, inner.residue, inner.depth), s * inner.modulus)
            assert outer.contains(member)

    @given(spec=st.sampled_from(SPECS), a=st.integers(0, 3), b=st.integers(0, 3), data=st.data())
    @settings(max_examples=200, deadline=None)
    def test_intersection_matches_membership(self, spec, a, b, data):
        first = Cylinder(spec, a, data.draw(st.integers(0, modulus(spec, a) - 1)))
        second = Cylinder(spec, b, data.draw(st.integers(0, modulus(spec, b) - 1)))
        depth = max(a, b)
        shared = any(
            first.contains(x) and second.contains(x)
            for x in (point_from_residue(spec, r, depth) for r in range(modulus(spec, depth)))
        )
        assert first.intersects(second) == shared

    @pytest.mark.unit
    def test_cylinder_residue_range(self, dyadic):
        with pytest.raises(UsageError):
            Cylinder(dyadic, 2, 4)


class TestFirstHit:
    @pytest.mark.unit
    def test_closed_form(self, dyadic):
        assert first_hit(zero_point(dyadic), Cylinder(dyadic, 3, 5)) == 5
        assert first_hit(point_from_residue(dyadic, 6, 3), Cylinder(dyadic, 3, 5)) == 7

    @pytest.mark.unit
    def test_horizon_exhausted(self, dyadic):
        result = first_hit_bruteforce(zero_point(dyadic), Cylinder(dyadic, 3, 5), horizon=4)
        assert result == NotFoundWithinHorizon(4)

    @given(spec=st.sampled_from(SPECS + [RadixSpec.factorial()]), depth=st.integers(0, 4), data=st.data())
    @settings(max_examples=200, deadline=None)
    def test_matches_bruteforce(self, spec, depth, data):
        m = modulus(spec, depth)
        x = point_from_residue(spec, data.draw(st.integers(0, m - 1)), depth)
        c = Cylinder(spec, depth, data.draw(st.integers(0, m - 1)))
        assert first_hit(x, c) == first_hit_bruteforce(x, c, horizon=m)

    @pytest.mark.slow
    @given(spec=st.sampled_from(ALL_SPECS), data=st.data())
    @settings(max_examples=1000, deadline=None)
    def test_matches_bruteforce_up_to_large_moduli(self, spec, data):
        depth = data.draw(st.sampled_from(depths_within(spec, 10 ** 5)))
        m = modulus(spec, depth)
        x = data.draw(exact_points(spec))
        c = Cylinder(spec, depth, data.draw(st.integers(0, m - 1)))
        assert first_hit(x, c) == first_hit_bruteforce(x, c, horizon=m)

    @pytest.mark.unit
    def test_sampled_point_hits(self, dyadic):
        x = SampledPoint(dyadic, 7)
        c = Cylinder(dyadic, 6, 13)
        assert first_hit(x, c) == first_hit_bruteforce(x, c, horizon=64)


class TestSampling:
    @pytest.mark.unit
    def test_digits_are_deterministic(self, dyadic):
        assert SampledPoint(dyadic, 11).digits(50) == SampledPoint(dyadic, 11).digits(50)

    @pytest.mark.unit
    def test_digits_stay_in_range(self):
        spec = RadixSpec.primes()
        x = SampledPoint(spec, 5)
        assert all(0 <= d < j for d, j in zip(x.digits(20), [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]))

    @pytest.mark.unit
    def test_derive_seed(self):
        assert derive_seed(1, 0) == derive_seed(1, 0)
        assert len({derive_seed(1, t) for t in range(100)}) == 100
