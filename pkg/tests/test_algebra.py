from fractions import Fraction as Fr
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polymean.algebra import (
    EXACT,
    ApproxField,
    BinomialCache,
    PolyInQ,
    Series,
    binom_gen,
    poly_in_q_eval,
    promote,
    series_binomial_pow,
    series_exp,
    series_log,
    series_mul,
    series_pow,
    series_substitute_power,
)
from polymean.errors import FieldMismatch, NonUnitConstantTerm, NonZeroConstantTerm


def S(*vals):
    return Series.from_values([Fr(v) for v in vals])


rationals = st.fractions(min_value=-5, max_value=5, max_denominator=12)


class TestBinom:
    def test_integer(self):
        assert binom_gen(5, 2) == 10

    def test_empty_product(self):
        for x in (Fr(7, 3), Fr(-2), 0):
            assert binom_gen(x, 0) == 1

    def test_half(self):
        assert binom_gen(Fr(-1, 2), 2) == Fr(3, 8)

    @given(rationals, st.integers(1, 12))
    def test_pascal(self, x, k):
        assert binom_gen(x + 1, k) == binom_gen(x, k) + binom_gen(x, k - 1)

    @given(st.integers(0, 30), st.integers(0, 30))
    def test_matches_math_comb(self, n, k):
        assert binom_gen(n, k) == comb(n, k)

    @given(rationals, st.integers(0, 10))
    def test_lowest_terms(self, x, k):
        v = binom_gen(x, k)
        assert isinstance(v, Fr)
        assert Fr(v.numerator, v.denominator) == v

    def test_cache(self):
        c = BinomialCache()
        assert c(Fr(-1, 2), 3) == binom_gen(Fr(-1, 2), 3)
        c(Fr(-1, 2), 3)
        assert len(c) == 1

    def test_float_field(self):
        F = ApproxField(128)
        x = F.ctx.mpf(-0.5)
        assert binom_gen(x, 2) == F.ctx.mpf(3) / 8


class TestSeriesArithmetic:
    def test_product(self):
        prod = series_mul(S(1, 1, 0), S(1, -1, 0))
        assert prod.coeffs == (1, 0, -1)

    def test_identity(self):
        a = S(3, Fr(1, 2), -2)
        assert series_mul(a, Series.one(2)) == a

    def test_truncated_product(self):
        assert series_mul(S(1, 1, 1), S(1, 1, 0)).coeffs == (1, 2, 2)

    def test_min_order(self):
        assert series_mul(S(1, 1, 1, 1), S(1, 1)).order == 1

    def test_index_past_order(self):
        with pytest.raises(IndexError):
            S(1, 2)[2]

    def test_truncate_never_extends(self):
        a = S(1, 2, 3)
        assert a.truncate(1).coeffs == (1, 2)
        with pytest.raises(ValueError):
            a.truncate(5)

    def test_derivative_and_eval(self):
        a = S(1, 2, 3)
        assert a.derivative().coeffs == (2, 6)
        assert a.evaluate(Fr(1, 2)) == Fr(1) + 1 + Fr(3, 4)

    @settings(max_examples=40)
    @given(st.lists(rationals, min_size=4, max_size=4), st.lists(rationals, min_size=4, max_size=4), st.lists(rationals, min_size=4, max_size=4))
    def test_ring_laws(self, x, y, z):
        a, b, c = (Series.from_values(v) for v in (x, y, z))
        assert series_mul(a, b) == series_mul(b, a)
        assert series_mul(series_mul(a, b), c) == series_mul(a, series_mul(b, c))
        assert series_mul(a, b + c) == series_mul(a, b) + series_mul(a, c)


class TestLogExp:
    def test_geometric(self):
        assert series_log(S(1, 1, 1, 1)).coeffs == (0, 1, Fr(1, 2), Fr(1, 3))

    def test_log_one(self):
        assert series_log(Series.one(4)) == Series.zero(4)

    def test_hand_value(self):
        assert series_log(S(1, Fr(1, 2), Fr(1, 3))).coeffs == (0, Fr(1, 2), Fr(5, 24))

    def test_log_needs_unit(self):
        with pytest.raises(NonUnitConstantTerm):
            series_log(S(2, 1))

    def test_exp_zero(self):
        assert series_exp(Series.zero(3)) == Series.one(3)

    def test_exp_t(self):
        assert series_exp(S(0, 1, 0, 0)).coeffs == (1, 1, Fr(1, 2), Fr(1, 6))

    def test_exp_needs_zero_constant(self):
        with pytest.raises(NonZeroConstantTerm):
            series_exp(S(1, 1))

    @settings(max_examples=50)
    @given(st.lists(rationals, min_size=1, max_size=7))
    def test_round_trip(self, tail):
        a = Series.from_values([Fr(1)] + tail)
        assert series_exp(series_log(a)) == a
        z = Series.from_values([Fr(0)] + tail)
        assert series_log(series_exp(z)) == z


class TestPowers:
    def test_one_minus_t(self):
        assert series_binomial_pow(1, 1, 2).coeffs == (1, -1, 0)

    def test_minus_two(self):
        assert series_binomial_pow(1, -2, 3).coeffs == (1, 2, 3, 4)

    def test_sqrt(self):
        assert series_binomial_pow(2, Fr(1, 2), 4).coeffs == (1, 0, Fr(-1, 2), 0, Fr(-1, 8))

    @settings(max_examples=30)
    @given(st.lists(rationals, min_size=1, max_size=6), st.integers(0, 5))
    def test_integer_power_matches_repeated_product(self, tail, m):
        a = Series.from_values([Fr(1)] + tail)
        expected = Series.one(a.order)
        for _ in range(m):
            expected = series_mul(expected, a)
        assert series_pow(a, m) == expected

    @settings(max_examples=30)
    @given(st.lists(rationals, min_size=1, max_size=6), rationals)
    def test_power_via_log(self, tail, m):
        a = Series.from_values([Fr(1)] + tail)
        assert series_pow(a, m) == series_exp(series_log(a).scale(m))


class TestSubstitute:
    def test_square(self):
        assert series_substitute_power(S(1, 1), 2).coeffs[:3] == (1, 0, 1)

    def test_cube(self):
        assert series_substitute_power(S(1, 1, 1), 3, order=6).coeffs == (1, 0, 0, 1, 0, 0, 1)

    def test_scale(self):
        assert series_substitute_power(S(1, 1), 1, scale=Fr(1, 2)).coeffs == (1, Fr(1, 2))

    def test_rejects_unknown_coefficients(self):
        with pytest.raises(ValueError):
            series_substitute_power(S(1, 1), 2, order=4)


class TestFields:
    def test_no_implicit_mixing(self):
        F = ApproxField(64)
        a = S(1, 1)
        b = Series.from_values([F.ctx.mpf(1), F.ctx.mpf(2)], F)
        with pytest.raises(FieldMismatch):
            series_mul(a, b)

    def test_exact_rejects_floats(self):
        with pytest.raises(FieldMismatch):
            EXACT.coerce(0.5)

    def test_explicit_promotion(self):
        F = ApproxField(96)
        b = promote(S(1, Fr(1, 3)), F)
        assert b.field is F
        assert abs(b[1] - F.ctx.mpf(1) / 3) < F.ctx.mpf(2) ** -90

    def test_fields_interned(self):
        assert ApproxField(80) is ApproxField(80)
        assert ApproxField(80) is not ApproxField(81)

    def test_foreign_context_rejected(self):
        F = ApproxField(128)
        with pytest.raises(FieldMismatch):
            Series.from_values([1, 1], F).evaluate(ApproxField(64).ctx.mpf(0.5))


class TestPolyInQ:
    P = PolyInQ({3: Fr(56), 2: Fr(-36), 1: Fr(8)})

    def test_eval(self):
        assert poly_in_q_eval(self.P, 2) == 320

    def test_monomial(self):
        assert PolyInQ({4: Fr(1)})(3) == 81

    def test_zero(self):
        assert PolyInQ({})(17) == 0
        assert str(PolyInQ({})) == "0"

    def test_render(self):
        assert str(self.P) == "56*q^3 - 36*q^2 + 8*q"
        assert str(PolyInQ({3: Fr(5, 16), 2: Fr(1, 16), 1: Fr(1, 8)})) == "5/16*q^3 + 1/16*q^2 + 1/8*q"

    def test_zeros_stripped(self):
        assert PolyInQ({3: Fr(1), 2: Fr(0)}) == PolyInQ({3: Fr(1)})
        assert PolyInQ({3: Fr(1), 2: Fr(0)}).degree == 3
