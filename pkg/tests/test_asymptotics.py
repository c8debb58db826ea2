import warnings
from fractions import Fraction as Fr
from math import comb

import pytest

from polymean.algebra import ApproxField
from polymean.asymptotics import (
    a_series,
    check_Al_bound,
    check_conda,
    check_propA,
    check_propB,
    constant_C,
    default_a_order,
    gorodetsky_expand,
    normalized_mean,
    thm2_expand,
    thm2_q_threshold,
)
from polymean.errors import CondaViolated, D1OutOfRange
from polymean.exact import A_l_of_N, T_exact_euler, T_poly_thm1
from polymean.profiles import make_profile

F = ApproxField(128)
mpf = F.ctx.mpf


class TestThm2:
    def test_q_gate(self):
        rep = thm2_expand(make_profile("inv_tau"), 190, 2, 1)
        gate = next(p for p in rep.preconditions if p.name.startswith("q >="))
        assert gate.required == 17**21 and not gate.satisfied
        assert not rep.rigorous
        assert rep.main_value == A_l_of_N(make_profile("inv_tau"), 0, 190) * 2**190

    def test_bound_formula(self):
        q = 3
        rep = thm2_expand(make_profile("inv_2_omega"), 190, q, 1)
        expected = mpf("3.1") * mpf(1) / 2 * mpf(q) ** 189 / F.ctx.sqrt(190)
        assert abs(rep.error_bound - expected) < expected * mpf(2) ** -120

    def test_central_binomial(self):
        prof = make_profile("inv_2_omega")
        for N in range(1, 51):
            assert A_l_of_N(prof, 0, N) == Fr(comb(2 * N, N), 4**N)

    def test_threshold(self):
        assert thm2_q_threshold(1) == 17**21
        assert thm2_q_threshold(2) == 34**33

    def test_d1_gate(self):
        with pytest.raises(D1OutOfRange):
            thm2_expand(make_profile("tau"), 190, 2, 1)
        with pytest.raises(D1OutOfRange):
            check_Al_bound(make_profile("one"), 190, 1)

    @pytest.mark.parametrize("q", [2, 3])
    def test_residual_identity(self, q):
        prof = make_profile("inv_tau")
        for N in range(1, 13):
            exact = T_exact_euler(prof, N, q)
            coeffs = T_poly_thm1(prof, N).coeffs
            for h in range(1, 4):
                main = thm2_expand(prof, N, q, h).main_value
                tail = sum(coeffs[l] * Fr(q) ** (N - l) for l in range(h, N))
                assert exact - main == tail


class TestAlBound:
    def test_inv_tau_1000(self):
        rep = check_Al_bound(make_profile("inv_tau"), 1000, 4)
        # 1000 / (36 ln 1000) is about 4.02
        assert rep.all_satisfied and rep.rigorous
        assert not check_Al_bound(make_profile("inv_tau"), 1000, 5).rigorous

    def test_A0_at_190(self):
        rep = check_Al_bound(make_profile("inv_2_omega"), 190, 0)
        assert rep.all_satisfied and rep.rigorous


class TestConditions:
    def test_conda_inv_tau(self):
        assert check_conda(make_profile("inv_tau"), 200).holds

    def test_conda_violation(self):
        rep = check_conda(make_profile("explicit", values=["1/2", 10]), 2)
        assert rep.first_violation == 2

    def test_tau_fails_everything(self):
        tau = make_profile("tau")
        assert check_conda(tau, 10).first_violation == 1
        assert check_propA(tau, 10).first_violation == 1
        assert check_propB(tau, 10).first_violation == 1

    @pytest.mark.parametrize("name,params", [("inv_tau_alpha", {"alpha": 1}), ("c_omega", {"c": "1/2"})])
    def test_propA_examples(self, name, params):
        assert check_propA(make_profile(name, **params), 100).holds

    @pytest.mark.parametrize("name,params", [("inv_tau_m", {"m": 3}), ("inv_tau_alpha", {"alpha": 2})])
    def test_propB_examples(self, name, params):
        assert check_propB(make_profile(name, **params), 100).holds

    def test_propB_inv_tau(self):
        assert check_propB(make_profile("inv_tau"), 100).first_violation == 1


class TestASeries:
    def test_shape(self):
        a = a_series(make_profile("inv_2_omega"), 3, 10)
        assert a[0] == 1 and a[1] == 0

    def test_two_routes_exact(self):
        prof = make_profile("inv_tau")
        assert a_series(prof, 3, 14, method="exp") == a_series(prof, 3, 14, method="product")

    def test_two_routes_float(self):
        prof = make_profile("inv_2_omega")
        e = a_series(prof, 2, 40, field=F, method="exp")
        p = a_series(prof, 2, 40, field=F, method="product")
        assert max(abs(x - y) for x, y in zip(e.coeffs, p.coeffs)) < mpf(10) ** -30

    def test_large_q(self):
        q = 101
        a = a_series(make_profile("inv_2_omega"), q, 20, field=F)
        assert abs(a.evaluate(mpf(1) / q) - 1) < mpf(5) / q

    def test_default_order(self):
        assert default_a_order(2, 3, 128) >= max(2 * 3 + 8, 32)


class TestConstants:
    def test_C0_factor_tends_to_one(self):
        # (2x - 1) / (2 sqrt(x^2 - x)) at x = 2^50
        x = mpf(2) ** 50
        assert abs((2 * x - 1) / (2 * F.ctx.sqrt(x * x - x)) - 1) < mpf(10) ** -25

    def test_C0_stable(self):
        a = constant_C("inv_2_omega", 2, l_max=60).value
        b = constant_C("inv_2_omega", 2, l_max=120).value
        assert abs(a - b) < mpf(10) ** -10 * a
        assert abs(a - mpf("1.1449813368")) < mpf(10) ** -9

    @pytest.mark.parametrize("name", ["inv_2_omega", "inv_tau"])
    def test_matches_a_series(self, name):
        c = constant_C(name, 2, l_max=120)
        a = a_series(make_profile(name), 2, 200, field=F).evaluate(mpf(1) / 2)
        assert abs(c.value - a) < mpf(10) ** -15

    def test_unknown(self):
        with pytest.raises(ValueError):
            constant_C("tau", 2)


class TestGorodetsky:
    def test_n0_main_term(self):
        prof = make_profile("inv_2_omega")
        N, q = 60, 3
        rep = gorodetsky_expand(prof, N, q, 0)
        a = rep.details["a_at_inverse_q"]
        expected = mpf(comb(2 * N, N)) / mpf(4) ** N * mpf(q) ** N * a
        assert abs(rep.main_value - expected) < abs(expected) * mpf(2) ** -110

    def test_corrections_shrink_error(self):
        prof = make_profile("inv_2_omega")
        N, q = 200, 2
        exact = F.promote(T_exact_euler(prof, N, q))
        errs = [abs(gorodetsky_expand(prof, N, q, n).main_value - exact) / exact for n in range(3)]
        assert errs[0] > errs[1] > errs[2]

    def test_precondition(self):
        rep = gorodetsky_expand(make_profile("inv_tau"), 2, 3, 2)
        assert not rep.rigorous
        assert any(p.name == "N >= n+1" and not p.satisfied for p in rep.preconditions)

    def test_conda_warning(self):
        prof = make_profile("explicit", values=["1/2", 10])
        with pytest.warns(CondaViolated):
            rep = gorodetsky_expand(prof, 20, 3, 0, conda_depth=5)
        assert rep.unsatisfied

    def test_shape_only(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            rep = gorodetsky_expand(make_profile("inv_tau"), 50, 2, 1)
        assert rep.bound_kind == "shape-only" and not rep.rigorous


def test_normalized_mean_limit():
    prof = make_profile("inv_2_omega")
    C0 = constant_C("inv_2_omega", 2).value
    x = normalized_mean(prof, T_exact_euler(prof, 100, 2), 100, 2)
    assert abs(x - C0) < mpf("0.003")
