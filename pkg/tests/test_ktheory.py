"""Lattice arithmetic, Euler form, twists, slopes, HN types."""

import itertools
import math
import random
from fractions import Fraction

import pytest

from loopcrystal import ktheory as kt
from loopcrystal.starlattice import WeightData


@pytest.fixture
def p1():
    return WeightData((1, 1, 1))


@pytest.fixture
def w222():
    return WeightData((2, 2, 2))


@pytest.fixture
def w237():
    return WeightData((2, 3, 7))


@pytest.fixture
def w2222():
    return WeightData((2, 2, 2, 2))


def random_element(curve, rng, span=4):
    coeffs = [rng.randint(-span, span) for _ in range(curve.n)]
    return curve.normalize(coeffs, l=rng.randint(-span, span))


def random_class(curve, rng, span=5):
    v = [rng.randint(-span, span) for _ in range(kt.lattice_rank(curve))]
    return kt.from_vector(curve, v)


class TestBasics:
    def test_lattice_rank(self, p1, w222, w237):
        assert kt.lattice_rank(p1) == 2
        assert kt.lattice_rank(w222) == 5
        assert kt.lattice_rank(w237) == 11

    def test_vector_roundtrip(self, w237):
        rng = random.Random(1)
        for _ in range(20):
            a = random_class(w237, rng)
            assert kt.from_vector(w237, kt.to_vector(a)) == a

    def test_json_roundtrip(self, w237):
        rng = random.Random(2)
        for _ in range(20):
            a = random_class(w237, rng)
            assert kt.KClass.from_json(a.to_json(), w237) == a

    def test_json_rejects_bad_index(self, w222):
        with pytest.raises(ValueError):
            kt.KClass.from_json({"r": 0, "d": 0, "m": {"1,5": 1}}, w222)

    def test_module_arithmetic(self, w222):
        rng = random.Random(3)
        for _ in range(20):
            a, b = random_class(w222, rng), random_class(w222, rng)
            assert kt.sub(kt.add(a, b), b) == a
            assert kt.scale(3, a) == kt.add(a, kt.add(a, a))

    def test_serial_full_period_is_delta(self, w237):
        for i, p in enumerate(w237.weights):
            if p == 1:
                continue
            for j in range(p):
                assert kt.class_of_serial(w237, i, j, p) == kt.delta_class(w237)

    def test_line_bundle_class(self, w237):
        x = w237.normalize([1, 2, 3], l=1)
        c = kt.class_of_line_bundle(w237, x)
        assert c.r == 1 and c.d == 1
        assert c.m[0] == (1,)
        assert c.m[1] == (1, 1)
        assert c.m[2] == (1, 1, 1, 0, 0, 0)


class TestEulerForm:
    def test_structure_and_point_pairings(self, p1, w222, w237, w2222):
        for curve in (p1, w222, w237, w2222):
            o = kt.structure_class(curve)
            dl = kt.delta_class(curve)
            assert kt.euler_form(curve, o, o) == 1
            assert kt.euler_form(curve, o, dl) == 1
            assert kt.euler_form(curve, dl, o) == -1
            assert kt.euler_form(curve, dl, dl) == 0

    def test_simple_pairings(self, w237):
        # Hom/Ext of exceptional simples: End is one-dimensional, the only
        # extension is onto the next head down, and S_{i,1} maps out of O.
        for i, p in enumerate(w237.weights):
            if p == 1:
                continue
            for j in range(1, p):
                a = kt.class_of_simple(w237, i, j)
                assert kt.euler_form(w237, a, a) == 1
                for k in range(1, p):
                    expected = 1 if k == j else (-1 if k == j - 1 else 0)
                    b = kt.class_of_simple(w237, i, k)
                    assert kt.euler_form(w237, a, b) == expected
                o = kt.structure_class(w237)
                assert kt.euler_form(w237, a, o) == (-1 if j == 1 else 0)
                assert kt.euler_form(w237, o, a) == 0
                dl = kt.delta_class(w237)
                assert kt.euler_form(w237, a, dl) == 0
                assert kt.euler_form(w237, dl, a) == 0

    def test_cross_point_simples_orthogonal(self, w237):
        a = kt.class_of_simple(w237, 0, 1)
        b = kt.class_of_simple(w237, 1, 2)
        assert kt.euler_form(w237, a, b) == 0
        assert kt.euler_form(w237, b, a) == 0

    def test_line_bundle_pairing_matches_section_counts(self, w237, w222):
        # <[O(x)], [O(y)]> = dim S_{y-x} - dim S_{x+w-y} for arbitrary x, y,
        # not only the spanning exponents used to build the Gram matrix.
        rng = random.Random(7)
        for curve in (w237, w222):
            omega = curve.omega()
            for _ in range(40):
                x = random_element(curve, rng, span=3)
                y = random_element(curve, rng, span=3)
                lhs = kt.euler_form(
                    curve,
                    kt.class_of_line_bundle(curve, x),
                    kt.class_of_line_bundle(curve, y),
                )
                rhs = curve.dim_sections(curve.sub(y, x)) - curve.dim_sections(
                    curve.sub(curve.add(x, omega), y)
                )
                assert lhs == rhs

    def test_bilinearity(self, w237):
        rng = random.Random(11)
        for _ in range(50):
            a, b, c = (random_class(w237, rng) for _ in range(3))
            assert kt.euler_form(w237, kt.add(a, b), c) == kt.euler_form(
                w237, a, c
            ) + kt.euler_form(w237, b, c)
            assert kt.euler_form(w237, a, kt.add(b, c)) == kt.euler_form(
                w237, a, b
            ) + kt.euler_form(w237, a, c)

    def test_matrix_cached(self, w222):
        assert kt.euler_matrix(w222) is kt.euler_matrix(w222)

    def test_real_roots(self, w237):
        assert kt.is_real_root(w237, kt.structure_class(w237))
        assert kt.is_real_root(w237, kt.class_of_simple(w237, 2, 3))
        assert not kt.is_real_root(w237, kt.delta_class(w237))


class TestDegreeSlopePositivity:
    def test_degree_values(self, w237):
        assert kt.degree_d(w237, kt.delta_class(w237)) == 42
        assert kt.degree_d(w237, kt.class_of_simple(w237, 0, 1)) == 21
        assert kt.degree_d(w237, kt.class_of_simple(w237, 1, 1)) == 14
        assert kt.degree_d(w237, kt.class_of_simple(w237, 2, 1)) == 6
        # the zeroth simple has the complementary degree within delta
        assert kt.degree_d(w237, kt.class_of_simple(w237, 2, 0)) == 6

    def test_degree_matches_line_bundle_degree(self, w237):
        rng = random.Random(13)
        for _ in range(20):
            x = random_element(w237, rng)
            assert kt.degree_d(
                w237, kt.class_of_line_bundle(w237, x)
            ) == w237.degree_partial(x)

    def test_slope(self, w237):
        assert kt.slope(w237, kt.delta_class(w237)) == math.inf
        assert kt.slope(w237, kt.structure_class(w237)) == 0
        x = w237.normalize([1, 0, 0], l=0)
        assert kt.slope(w237, kt.class_of_line_bundle(w237, x)) == Fraction(21)
        two_o = kt.scale(2, kt.structure_class(w237))
        assert kt.slope(w237, kt.add(two_o, kt.delta_class(w237))) == Fraction(42, 2)

    def test_slope_zero_class_raises(self, w237):
        with pytest.raises(ValueError, match="zero class"):
            kt.slope(w237, kt.zero_class(w237))

    def test_positivity(self, w237):
        assert kt.is_positive(w237, kt.zero_class(w237))
        assert kt.is_positive(w237, kt.structure_class(w237))
        assert not kt.is_positive(w237, kt.scale(-1, kt.structure_class(w237)))
        assert kt.is_positive(w237, kt.delta_class(w237))
        assert kt.is_positive(w237, kt.class_of_simple(w237, 1, 0))
        assert not kt.is_positive(
            w237, kt.scale(-1, kt.class_of_simple(w237, 1, 1))
        )
        # d covers one missing head but not two
        s10 = kt.class_of_simple(w237, 1, 0)
        s20 = kt.class_of_simple(w237, 2, 0)
        both = kt.add(s10, s20)
        assert kt.is_positive(w237, both)
        assert not kt.is_positive(w237, kt.sub(both, kt.delta_class(w237)))

    def test_rank0_positive_iff_serial_sum(self, w222):
        # brute force: rank-0 positive classes of small degree are exactly the
        # sums of serial-sheaf classes
        realizable = set()
        serials = [
            kt.class_of_serial(w222, i, j, l)
            for i in range(3)
            for j in range(2)
            for l in (1, 2)
        ] + [kt.delta_class(w222)]
        def in_box(a):
            return a.d <= 2 and max(abs(v) for row in a.m for v in row) <= 3

        frontier = {kt.zero_class(w222)}
        for _ in range(9):
            frontier = {
                c for c in (kt.add(a, s) for a in frontier for s in serials)
                if in_box(c)
            }
            realizable |= frontier
        for v in itertools.product(range(-2, 4), repeat=4):
            a = kt.from_vector(w222, [0, v[0], v[1], v[2], v[3]])
            if a == kt.zero_class(w222):
                continue
            if 0 <= a.d <= 2 and max(map(abs, v[1:])) <= 2:
                assert kt.is_positive(w222, a) == (a in realizable), a


class TestTwists:
    def test_twist_structure_gives_line_bundle(self, w237):
        rng = random.Random(17)
        for _ in range(20):
            x = random_element(w237, rng)
            assert kt.twist_class(
                w237, kt.structure_class(w237), x
            ) == kt.class_of_line_bundle(w237, x)

    def test_twist_composes_on_line_bundles(self, w237, w222):
        rng = random.Random(19)
        for curve in (w237, w222):
            for _ in range(25):
                x = random_element(curve, rng, span=3)
                y = random_element(curve, rng, span=3)
                assert kt.twist_class(
                    curve, kt.class_of_line_bundle(curve, x), y
                ) == kt.class_of_line_bundle(curve, curve.add(x, y))

    def test_twist_by_generator_shifts_simples(self, w237):
        for i, p in enumerate(w237.weights):
            xi = w237.x(i)
            for j in range(p):
                assert kt.twist_class(
                    w237, kt.class_of_simple(w237, i, j), xi
                ) == kt.class_of_simple(w237, i, j + 1)

    def test_twist_fixes_other_points(self, w237):
        xi = w237.x(0)
        a = kt.class_of_simple(w237, 2, 4)
        assert kt.twist_class(w237, a, xi) == a

    def test_twist_by_canonical_shifts_heads_down(self, w237):
        om = w237.omega()
        for i, p in enumerate(w237.weights):
            for j in range(p):
                assert kt.twist_class(
                    w237, kt.class_of_simple(w237, i, j), om
                ) == kt.class_of_simple(w237, i, j - 1)

    def test_twist_by_c_adds_rank_to_delta(self, w237):
        rng = random.Random(23)
        for _ in range(10):
            a = random_class(w237, rng)
            tw = kt.twist_class(w237, a, w237.c())
            assert tw == kt.add(a, kt.scale(a.r, kt.delta_class(w237)))

    def test_twist_preserves_euler_form(self, w222):
        rng = random.Random(29)
        for _ in range(15):
            a, b = random_class(w222, rng), random_class(w222, rng)
            x = random_element(w222, rng, span=2)
            assert kt.euler_form(
                w222, kt.twist_class(w222, a, x), kt.twist_class(w222, b, x)
            ) == kt.euler_form(w222, a, b)


class TestHNTypes:
    def test_rank_zero_is_single_part(self, p1):
        dl = kt.delta_class(p1)
        assert kt.hn_types(p1, dl) == [(dl,)]

    def test_requires_window_for_positive_rank(self, p1):
        with pytest.raises(ValueError, match="unbounded"):
            kt.hn_types(p1, kt.structure_class(p1))

    def test_structure_sheaf_window(self, p1):
        o = kt.structure_class(p1)
        dl = kt.delta_class(p1)
        got = kt.hn_types(p1, o, slope_window=(-1, 1), max_parts=2)
        assert set(got) == {(o,), (dl, kt.sub(o, dl))}

    def test_structure_plus_point(self, p1):
        o = kt.structure_class(p1)
        dl = kt.delta_class(p1)
        a = kt.add(o, dl)
        got = kt.hn_types(p1, a, slope_window=(0, math.inf), max_parts=2)
        assert set(got) == {(a,), (dl, o)}

    def test_parts_sum_and_slopes_decrease(self, w222):
        a = kt.add(
            kt.scale(2, kt.structure_class(w222)), kt.delta_class(w222)
        )
        for parts in kt.hn_types(w222, a, slope_window=(-2, 3), max_parts=3):
            total = kt.zero_class(w222)
            slopes = []
            for part in parts:
                assert kt.is_positive(w222, part)
                total = kt.add(total, part)
                slopes.append(kt.slope(w222, part))
            assert total == a
            assert all(s0 > s1 for s0, s1 in zip(slopes, slopes[1:]))

    def test_invalid_inputs(self, p1):
        with pytest.raises(ValueError):
            kt.hn_types(p1, kt.zero_class(p1), slope_window=(0, 1))
        with pytest.raises(ValueError, match="finite lower bound"):
            kt.hn_types(
                p1, kt.structure_class(p1), slope_window=(-math.inf, 0)
            )
