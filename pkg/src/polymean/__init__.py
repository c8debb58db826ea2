"""Exact and asymptotic mean values of multiplicative functions over F_q[T]."""

from .algebra import EXACT, ApproxField, PolyInQ, Series
from .asymptotics import (
    check_Al_bound,
    check_conda,
    check_propA,
    check_propB,
    constant_C,
    gorodetsky_expand,
    normalized_mean,
    thm2_expand,
)
from .exact import A_l_of_N, T_exact_euler, T_poly_thm1, crosscheck_exact, euler_product_series
from .oracle import brute_T, factor, irreducible_sieve
from .profiles import PRESETS, DProfile, make_profile
from .sequences import a_from_d, h_from_d, partition_count, pi_q

__version__ = "0.1.0"

__all__ = [
    "EXACT",
    "PRESETS",
    "A_l_of_N",
    "ApproxField",
    "DProfile",
    "PolyInQ",
    "Series",
    "T_exact_euler",
    "T_poly_thm1",
    "a_from_d",
    "brute_T",
    "check_Al_bound",
    "check_conda",
    "check_propA",
    "check_propB",
    "constant_C",
    "crosscheck_exact",
    "euler_product_series",
    "factor",
    "gorodetsky_expand",
    "h_from_d",
    "irreducible_sieve",
    "make_profile",
    "normalized_mean",
    "partition_count",
    "pi_q",
    "thm2_expand",
]
