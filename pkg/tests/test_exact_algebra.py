from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import series
from vertexlab.exact_algebra import (
    QQ,
    ZZ,
    BivariateSeries,
    CoefficientRing,
    MultiSeries,
    TruncSeries,
    Zmod,
    series_compose,
    series_invert_unit,
    series_mul,
    series_reversion,
)


def S(coeffs, order=None, ring=QQ):
    return TruncSeries(ring, coeffs, order)


class TestCoefficientRing:
    def test_parse_round_trip(self):
        for text in ("Q", "Z", "Z/7"):
            assert CoefficientRing.parse(text).name == text

    def test_mod_reduces_to_canonical_representative(self):
        R = Zmod(6)
        assert R(-1) == 5
        assert R(Fraction(1, 5)) == 5  # 5 * 5 = 25 = 1 mod 6

    def test_mod_rejects_non_invertible_denominator(self):
        with pytest.raises(ValueError):
            Zmod(6)(Fraction(1, 2))

    def test_bad_modulus(self):
        with pytest.raises(ValueError):
            Zmod(1)

    def test_units(self):
        assert Zmod(8).is_unit(3) and not Zmod(8).is_unit(4)
        assert ZZ.is_unit(-1) and not ZZ.is_unit(2)
        with pytest.raises(ZeroDivisionError):
            Zmod(8).inverse(2)


class TestSeriesExamples:
    def test_difference_of_squares(self):
        assert series_mul(S([1, 1], 4), S([1, -1], 4)) == S([1, 0, -1], 4)

    def test_identity_product(self):
        assert series_mul(S([1, 1], 3), S([1], 3)) == S([1, 1], 3)

    def test_cube_difference(self):
        assert series_mul(S([1, 1, 1], 3), S([1, -1], 3)) == S([1, 0, 0, -1], 3)

    def test_product_order_is_min(self):
        assert series_mul(S([1, 1], 5), S([1, 1], 2)).order == 2

    def test_ring_mismatch(self):
        with pytest.raises(ValueError):
            series_mul(S([1], 2), S([1], 2, Zmod(3)))

    def test_compose_identity(self):
        s = S([0, 2, -1, 5], 3)
        assert series_compose(S([0, 1], 3), s) == s

    def test_compose_geometric(self):
        g = S([0, 1, 1, 1], 3)
        assert series_compose(g, g) == S([0, 1, 2, 4], 3)

    def test_compose_square(self):
        assert series_compose(S([0, 0, 1], 4), S([0, 1, 1], 4)) == S([0, 0, 1, 2, 1], 4)

    def test_compose_rejects_constant_term(self):
        with pytest.raises(ValueError):
            series_compose(S([0, 1], 3), S([1, 1], 3))

    def test_invert_geometric(self):
        assert series_invert_unit(S([1, -1], 3)) == S([1, 1, 1, 1], 3)

    def test_invert_one(self):
        assert series_invert_unit(S([1], 4)) == S([1], 4)

    def test_invert_square(self):
        assert series_invert_unit(S([1, 2, 1], 2)) == S([1, -2, 3], 2)

    def test_invert_non_unit(self):
        with pytest.raises(ZeroDivisionError):
            series_invert_unit(S([2, 1], 3, Zmod(4)))

    def test_equality_at_common_precision(self):
        assert S([1, 2, 3], 2) == S([1, 2], 1)
        assert S([1, 2, 3], 2) != S([1, 3], 1)


@settings(max_examples=40, deadline=None)
@given(series(), series(), series())
def test_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert a + (b - a) == b


@settings(max_examples=100, deadline=None)
@given(series(unit_constant=True))
def test_inverse_times_series_is_one(a):
    assert a * series_invert_unit(a) == S([1], a.order)


@settings(max_examples=30, deadline=None)
@given(series(zero_constant=True, order=5), series(zero_constant=True, order=5), series(zero_constant=True, order=5))
def test_composition_is_associative(f, g, h):
    assert series_compose(series_compose(f, g), h) == series_compose(f, series_compose(g, h))


@settings(max_examples=30, deadline=None)
@given(series(zero_constant=True, order=6))
def test_reversion(f):
    f = f + S([0, 1 - f[1]], f.order)  # force unit linear term 1
    g = series_reversion(f)
    x = S([0, 1], f.order)
    assert series_compose(f, g) == x and series_compose(g, f) == x


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-9, 9), min_size=5, max_size=5), st.lists(st.integers(-9, 9), min_size=5, max_size=5),
       st.sampled_from([2, 3, 6, 7, 10]))
def test_mod_n_matches_rational_reduction(ac, bc, n):
    R = Zmod(n)
    a, b = S(ac, 4), S(bc, 4)
    am, bm = S(ac, 4, R), S(bc, 4, R)
    prod = series_mul(a, b)
    assert series_mul(am, bm) == S([int(c) for c in prod.coeffs], 4, R)
    if ac[0] % n and R.is_unit(ac[0] % n):
        inv = series_invert_unit(S([1] + ac[1:], 4))
        assert series_invert_unit(S([1] + ac[1:], 4, R)) == S([int(c) for c in inv.coeffs], 4, R)


class TestMultiSeries:
    def test_bivariate_product_truncates_by_total_degree(self):
        X = BivariateSeries.variable(QQ, 0, 3)
        Y = BivariateSeries.variable(QQ, 1, 3)
        p = (X + Y) ** 4
        assert p.is_zero()
        q = (X + Y) ** 3
        assert q.coeff(2, 1) == 3 and q.coeff(0, 3) == 1

    def test_substitute(self):
        X = BivariateSeries.variable(QQ, 0, 4)
        Y = BivariateSeries.variable(QQ, 1, 4)
        F = X + Y + X * Y
        t = S([0, 1], 4)
        # F(t, t) = 2t + t^2
        assert F.substitute(t, t) == S([0, 2, 1], 4)

    def test_swap_and_restrictions(self):
        F = BivariateSeries(QQ, 3, {(1, 0): 1, (0, 1): 1, (2, 1): 5})
        assert F.swap().coeff(1, 2) == 5
        assert F.at_y_zero() == S([0, 1], 3)

    def test_trivariate_embed(self):
        F = BivariateSeries(QQ, 3, {(1, 0): 1, (0, 1): 1})
        G = F.embed(3, (1, 2))
        assert isinstance(G, MultiSeries) and G.coeff(0, 1, 0) == 1 and G.coeff(0, 0, 1) == 1
