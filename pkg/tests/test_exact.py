from fractions import Fraction as Fr
from math import comb

import pytest

from polymean.algebra import PolyInQ, binom_gen
from polymean.errors import FloatProfileNotSupported, MismatchDetected
from polymean.exact import (
    A_l_of_N,
    T_exact_euler,
    T_poly_thm1,
    crosscheck_exact,
    euler_product_series,
    partition_tuples,
)
from polymean.oracle import brute_T
from polymean.profiles import make_profile
from polymean.sequences import partition_count

EXACT_PRESETS = [
    ("one", {}),
    ("tau", {}),
    ("tau_m", {"m": 3}),
    ("tau_k_of_F_r", {"k": 3, "r": 2}),
    ("tau3_of_F2", {}),
    ("inv_tau", {}),
    ("inv_tau_alpha", {"alpha": 2}),
    ("c_omega", {"c": "1/3"}),
    ("inv_2_omega", {}),
    ("ratio_tau", {"m": 2}),
    ("inv_tau_Fr", {"r": 2}),
    ("inv_tau_m", {"m": 3}),
    ("g7", {}),
    ("inv_tau_m_Fr", {"m": 3, "r": 2}),
]


def B(x, k):
    return binom_gen(x, k) if k >= 0 else 0


def closed_A(d, l, N):
    d1, d2, d3 = d[1], d[2], d[3]
    if l == 0:
        return B(d1 + N - 1, N)
    if l == 1:
        return B(d1 + N - 3, N - 2) * (d2 - d1 * (d1 + 1) / 2)
    return B(d1 + N - 4, N - 3) * (d3 - d1 * d2 + d1 * (d1**2 - 1) / 3) + B(d1 + N - 5, N - 4) * B(
        1 + d2 - d1 * (d1 + 1) / 2, 2
    )


class TestPartitionTuples:
    @pytest.mark.parametrize("l", range(0, 15))
    def test_count_is_partition_number(self, l):
        tuples = list(partition_tuples(l))
        assert len(tuples) == partition_count(l)
        for ks in tuples:
            assert sum((j - 1) * k for j, k in ks.items()) == l
        assert len({tuple(sorted(ks.items())) for ks in tuples}) == len(tuples)

    def test_stats(self):
        stats = {}
        A_l_of_N(make_profile("inv_tau"), 6, 8, stats=stats)
        assert stats["tuples"] <= partition_count(6)


class TestClosedForms:
    @pytest.mark.parametrize("name,params", EXACT_PRESETS)
    def test_first_three_coefficients(self, name, params):
        prof = make_profile(name, **params)
        d = prof.ds(3)
        for N in (3, 5, 8):
            for l in range(3):
                if l <= N - 1:
                    assert A_l_of_N(prof, l, N) == closed_A(d, l, N), (name, l, N)

    def test_inv_tau_A2_at_6(self):
        prof = make_profile("inv_tau")
        assert A_l_of_N(prof, 2, 6) == closed_A([1, Fr(1, 2), Fr(1, 3), Fr(1, 4)], 2, 6)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            A_l_of_N(make_profile("inv_tau"), 3, 3)


class TestPolynomial:
    def test_tau3_of_F2(self):
        assert T_poly_thm1(make_profile("tau3_of_F2"), 3).poly == PolyInQ({3: Fr(56), 2: Fr(-36), 1: Fr(8)})

    def test_inv_2_omega(self):
        assert T_poly_thm1(make_profile("inv_2_omega"), 3).poly == PolyInQ({3: Fr(5, 16), 2: Fr(1, 16), 1: Fr(2, 16)})

    def test_inv_tau(self):
        assert T_poly_thm1(make_profile("inv_tau"), 3).poly == PolyInQ({3: Fr(15, 48), 2: Fr(-1, 48), 1: Fr(-2, 48)})

    def test_no_constant_term(self):
        for N in range(1, 9):
            assert T_poly_thm1(make_profile("inv_tau"), N).poly.coeff(0) == 0

    @pytest.mark.parametrize("N", range(1, 11))
    def test_one(self, N):
        assert T_poly_thm1(make_profile("one"), N).poly == PolyInQ({N: Fr(1)})

    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_tau_m(self, m):
        for N in range(1, 11):
            assert T_poly_thm1(make_profile("tau_m", m=m), N).poly == PolyInQ({N: Fr(comb(N + m - 1, m - 1))})

    def test_tau_k_of_F_r_leading(self):
        # leading coefficient binom(d_1 + N - 1, N) with d_1 = tau_k(P^r)
        k, r = 3, 2
        d1 = comb(r + k - 1, k - 1)
        for N in range(1, 7):
            poly = T_poly_thm1(make_profile("tau_k_of_F_r", k=k, r=r), N).poly
            assert poly.coeff(N) == comb(d1 + N - 1, N)

    def test_float_rejected(self):
        with pytest.raises(FloatProfileNotSupported):
            T_poly_thm1(make_profile("inv_tau_alpha", alpha=0.5), 3)


class TestEuler:
    def test_inv_tau_q2(self):
        assert T_exact_euler(make_profile("inv_tau"), 3, 2) == Fr(7, 3)

    def test_tau(self):
        assert T_exact_euler(make_profile("tau"), 4, 3) == 405

    def test_one(self):
        assert T_exact_euler(make_profile("one"), 5, 7) == 16807

    def test_series_holds_all_degrees(self):
        prof = make_profile("inv_2_omega")
        s = euler_product_series(prof, 10, 3)
        assert s[0] == 1
        assert [s[N] for N in range(1, 11)] == [T_exact_euler(prof, N, 3) for N in range(1, 11)]

    def test_float_profile_close_to_oracle(self):
        prof = make_profile("inv_tau_alpha", alpha=0.5, precision_bits=96)
        ctx = prof.field.ctx
        for N in (3, 5):
            e, b = T_exact_euler(prof, N, 3), brute_T(prof, 3, N)
            assert abs(e - b) <= ctx.mpf(2) ** -80 * abs(b)


class TestCrosscheck:
    def test_inv_tau(self):
        rep = crosscheck_exact(make_profile("inv_tau"), range(1, 9), [2, 3, 5])
        assert rep.passed and rep.first_failure is None
        assert len(rep.entries) == 24

    def test_c_omega_third(self):
        assert crosscheck_exact(make_profile("c_omega", c="1/3"), range(1, 7), [2, 3]).passed

    def test_one(self):
        rep = crosscheck_exact(make_profile("one"), 5, [7])
        assert rep.entries[0].poly_value == rep.entries[0].euler_value == 16807

    def test_mismatch_raises(self, monkeypatch):
        import polymean.exact as ex

        real = ex.euler_product_series

        def broken(profile, N, q):
            s = real(profile, N, q)
            return type(s)(s.coeffs[:-1] + (s.coeffs[-1] + 1,), s.field)

        monkeypatch.setattr(ex, "euler_product_series", broken)
        with pytest.raises(MismatchDetected):
            crosscheck_exact(make_profile("inv_tau"), 3, [2])
        rep = crosscheck_exact(make_profile("inv_tau"), 3, [2], strict=False)
        assert not rep.passed and rep.first_failure.N == 3
