"""Truncated expansions of ``T(N)`` with their error bounds and precondition audits.

Two expansions are offered.  :func:`thm2_expand` keeps the first ``h``
terms of the exact polynomial in ``q`` and attaches the explicit
``3.1 d_1 p(h) q^{N-h} / N^{1-d_1}`` bound, which is only proven for very
large ``q``; the report says whether the inputs are in that regime.
:func:`gorodetsky_expand` is the fixed-``q``, large-``N`` expansion built on
``a(x) = prod_l {f(x^l) (1 - x^l)^{d_1}}^{pi_q(l)}``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .algebra import (
    DEFAULT_PRECISION_BITS,
    ApproxField,
    Series,
    binom_gen,
    series_binomial_pow,
    series_exp,
    series_mul,
    series_pow,
    series_substitute_power,
)
from .errors import CondaViolated, D1OutOfRange
from .exact import A_l_of_N
from .profiles import DProfile
from .sequences import a_from_d, cap_A_list, h_from_d, partition_count, pi_q

DEFAULT_CONDA_DEPTH = 100


@dataclass(frozen=True)
class Precondition:
    name: str
    required: Any
    actual: Any
    satisfied: bool


@dataclass(frozen=True)
class ExpansionReport:
    mode: str
    main_value: Any
    error_bound: Any
    preconditions: tuple
    bound_kind: str = "rigorous"
    details: dict = field(default_factory=dict)

    @property
    def rigorous(self) -> bool:
        return self.bound_kind == "rigorous" and all(p.satisfied for p in self.preconditions)

    @property
    def unsatisfied(self) -> list:
        return [p for p in self.preconditions if not p.satisfied]


@dataclass(frozen=True)
class ConditionReport:
    condition: str
    checked_up_to: int
    first_violation: int | None

    @property
    def holds(self) -> bool:
        return self.first_violation is None


def _approx_for(profile: DProfile, precision_bits: int | None) -> ApproxField:
    if precision_bits is None:
        precision_bits = profile.field.precision_bits or DEFAULT_PRECISION_BITS
    return ApproxField(precision_bits)


def _require_d1(profile: DProfile):
    d1 = profile.d1
    if not 0 < d1 < 1:
        raise D1OutOfRange(f"{profile.label}: d_1 = {d1} is not in (0, 1)")
    return d1


def _to_float(fld: ApproxField, x):
    return fld.promote(x)


def check_conda(profile: DProfile, K: int) -> ConditionReport:
    """``k |a_k| <= 1`` for ``k = 1..K``."""
    if K < 1:
        raise ValueError("K must be positive")
    a = a_from_d(profile, K)
    bad = next((k for k in range(1, K + 1) if k * abs(a[k - 1]) > 1), None)
    return ConditionReport("conda", K, bad)


def check_propA(profile: DProfile, K: int) -> ConditionReport:
    """``d_1 in (0,1)``, ``d_{k+1} <= d_k`` and ``k d_k <= (k+1) d_{k+1}`` for ``k < K``."""
    if K < 2:
        raise ValueError("K must be at least 2")
    d = profile.ds(K)
    if not 0 < d[1] < 1:
        return ConditionReport("propA", K, 1)
    for k in range(1, K):
        if d[k + 1] > d[k] or k * d[k] > (k + 1) * d[k + 1]:
            return ConditionReport("propA", K, k)
    return ConditionReport("propA", K, None)


def check_propB(profile: DProfile, K: int) -> ConditionReport:
    """``d_1 in (0,1)`` and ``sum_{k<=n} |d_k| + (n+1) |d_{n+1}| <= 1`` for ``n < K``."""
    if K < 1:
        raise ValueError("K must be positive")
    d = profile.ds(K)
    if not 0 < d[1] < 1:
        return ConditionReport("propB", K, 1)
    running = profile.field.zero
    for n in range(1, K):
        running += abs(d[n])
        if running + (n + 1) * abs(d[n + 1]) > 1:
            return ConditionReport("propB", K, n)
    return ConditionReport("propB", K, None)


def thm2_q_threshold(h: int) -> int:
    """``(17h)^(12h+9)``."""
    return (17 * h) ** (12 * h + 9)


def thm2_expand(
    profile: DProfile,
    N: int,
    q: int,
    h: int,
    *,
    conda_depth: int = DEFAULT_CONDA_DEPTH,
    precision_bits: int | None = None,
) -> ExpansionReport:
    """First ``h`` terms of the exact expansion plus the ``3.1 d_1 p(h)`` error bound."""
    d1 = _require_d1(profile)
    if N < 1 or h < 1 or q < 2:
        raise ValueError("need N >= 1, h >= 1, q >= 2")
    fld = _approx_for(profile, precision_bits)
    ctx = fld.ctx
    hs = h_from_d(profile, h)
    terms = [A_l_of_N(profile, l, N, h=hs) for l in range(min(h, N))]
    qv = profile.field.coerce(q)
    main = profile.field.zero
    for l, A in enumerate(terms):
        main += A * qv ** (N - l)
    d1f = _to_float(fld, d1)
    bound = ctx.mpf("3.1") * d1f * partition_count(h) * ctx.power(q, N - h) / ctx.power(N, 1 - d1f)

    h_max = N / (36 * math.log(N)) if N > 1 else 0.0
    q_req = thm2_q_threshold(h)
    conda = check_conda(profile, conda_depth)
    pre = (
        Precondition("N >= 190", 190, N, N >= 190),
        Precondition("1 <= h <= N/(36 ln N)", h_max, h, 1 <= h <= h_max),
        Precondition("q >= (17h)^(12h+9)", q_req, q, q >= q_req),
        Precondition(f"k|a_k| <= 1 for k <= {conda_depth}", conda_depth, conda.first_violation, conda.holds),
    )
    proof_form = ctx.power(6 * ctx.e * h, 12 * h + 9)
    details = {
        "A": terms,
        "p(h)": partition_count(h),
        "q_threshold_statement": q_req,
        "q_threshold_proof_form": proof_form,
    }
    return ExpansionReport("thm2", main, bound, pre, "rigorous", details)


@dataclass(frozen=True)
class AlBoundEntry:
    l: int
    value: Any
    bound: Any
    margin: Any

    @property
    def satisfied(self) -> bool:
        return self.margin >= 0


@dataclass(frozen=True)
class AlBoundReport:
    profile: str
    N: int
    entries: tuple
    rigorous: bool

    @property
    def all_satisfied(self) -> bool:
        return all(e.satisfied for e in self.entries)


def check_Al_bound(profile: DProfile, N: int, l_max: int, *, precision_bits: int | None = None) -> AlBoundReport:
    """Compare exact ``|A_l(N)|`` with ``3 d_1 p(l) / N^{1-d_1}`` for ``l <= l_max``.

    ``rigorous`` is false when ``N < 190`` or ``l_max`` exceeds ``N/(36 ln N)``;
    the comparison is still made.
    """
    d1 = _require_d1(profile)
    if l_max > N - 1:
        raise ValueError("l_max must be at most N-1")
    fld = _approx_for(profile, precision_bits)
    ctx = fld.ctx
    d1f = _to_float(fld, d1)
    scale = 3 * d1f / ctx.power(N, 1 - d1f)
    hs = h_from_d(profile, l_max + 1)
    entries = []
    for l in range(l_max + 1):
        A = A_l_of_N(profile, l, N, h=hs)
        bound = scale * partition_count(l)
        entries.append(AlBoundEntry(l, A, bound, bound - abs(_to_float(fld, A))))
    rigorous = N >= 190 and l_max <= N / (36 * math.log(N))
    return AlBoundReport(profile.label, N, tuple(entries), rigorous)


def _series_profile(profile: DProfile, field) -> DProfile:
    return profile if field is profile.field else profile.promote(field)


def a_series(profile: DProfile, q: int, order: int, *, field=None, method: str = "exp") -> Series:
    """Taylor coefficients of ``a(x)`` to ``x^order``.

    ``method="exp"`` exponentiates ``sum_{k>=2} A_k q^k x^k``;
    ``method="product"`` multiplies the truncated factors
    ``{f(x^l) (1-x^l)^{d_1}}^{pi_q(l)}`` for ``l <= order``.
    """
    _require_d1(profile)
    if order < 2:
        raise ValueError("order must be at least 2")
    if q < 2:
        raise ValueError("q must be at least 2")
    fld = field or profile.field
    prof = _series_profile(profile, fld)
    if method == "exp":
        return series_exp(Series(tuple(cap_A_list(prof, 1, q, order, scaled=True)), fld))
    if method != "product":
        raise ValueError(f"unknown method {method!r}")
    f = Series.from_values(prof.ds(order), fld)
    f2 = series_mul(f, series_binomial_pow(1, prof.d1, order, fld))
    acc = Series.one(order, fld)
    for l in range(1, order // 2 + 1):
        # f2 = 1 + O(y^2), so factors with 2l > order contribute nothing
        factor = series_pow(f2.truncate(order // l), pi_q(l, q))
        acc = series_mul(acc, series_substitute_power(factor, l, order=order))
    return acc


def default_a_order(q: int, n: int, precision_bits: int) -> int:
    """Truncation order for ``a`` at ``x = 1/q``: terms decay roughly like ``q^{-k/2}``."""
    return max(2 * n + 8, 32, math.ceil(2 * precision_bits / math.log2(q)) + n + 8)


def _tail_estimate(ctx, terms: list):
    """Geometric tail of a series with terms ``terms`` estimated from their last two quarters."""
    M = len(terms) - 1
    if M < 8:
        return ctx.inf
    quarter = M // 4
    last = max(abs(t) for t in terms[M - quarter + 1 :])
    prev = max(abs(t) for t in terms[M - 2 * quarter + 1 : M - quarter + 1])
    if last == 0:
        return ctx.zero
    if prev == 0:
        return ctx.inf
    r = (last / prev) ** (ctx.mpf(1) / quarter)
    if r >= 1:
        return ctx.inf
    return last * r / (1 - r)


def gorodetsky_expand(
    profile: DProfile,
    N: int,
    q: int,
    n: int,
    *,
    precision_bits: int | None = None,
    order: int | None = None,
    conda_depth: int = DEFAULT_CONDA_DEPTH,
) -> ExpansionReport:
    """Fixed-``q`` expansion with ``n`` correction terms built from derivatives of ``a`` at ``1/q``.

    The error ``R_n`` is only known up to an unspecified ``n``-dependent
    constant, so the reported bound is the shape
    ``q^N / N^{1-d_1} (1 / (sqrt(q) N))^{n+1}`` with constant 1.
    """
    d1 = _require_d1(profile)
    if N < 1 or n < 0 or q < 2:
        raise ValueError("need N >= 1, n >= 0, q >= 2")
    fld = _approx_for(profile, precision_bits)
    ctx = fld.ctx
    if order is None:
        order = default_a_order(q, n, fld.precision_bits)
    conda = check_conda(profile, conda_depth)
    if not conda.holds:
        warnings.warn(
            f"{profile.label}: k|a_k| <= 1 fails at k={conda.first_violation}; expansion is not rigorous",
            CondaViolated,
            stacklevel=2,
        )

    a = a_series(profile, q, order, field=fld)
    x = ctx.mpf(1) / q
    d1f = _to_float(fld, d1)
    lead_exact = binom_gen(-d1, N) * (-1) ** N
    lead = _to_float(fld, lead_exact) * ctx.power(q, N)

    series = a
    bracket = a.evaluate(x)
    corrections = []
    fact = 1
    for k in range(1, n + 1):
        series = series.derivative()
        fact *= k
        deriv = series.evaluate(x)
        weight = _to_float(fld, binom_gen(k - d1, k)) / _to_float(fld, binom_gen(N + d1 - 1, k))
        term = weight * x**k / fact * deriv
        corrections.append(term)
        bracket += term

    main = lead * bracket
    shape = ctx.power(q, N) / ctx.power(N, 1 - d1f) * ctx.power(1 / (ctx.sqrt(q) * N), n + 1)
    tail = _tail_estimate(ctx, [c * x**k for k, c in enumerate(a.coeffs)])
    pre = (
        Precondition("N >= n+1", n + 1, N, N >= n + 1),
        Precondition(f"k|a_k| <= 1 for k <= {conda_depth}", conda_depth, conda.first_violation, conda.holds),
    )
    details = {
        "leading_coefficient": lead_exact,
        "a_at_inverse_q": a.evaluate(x),
        "corrections": corrections,
        "a_order": order,
        "a_tail_estimate": tail,
    }
    return ExpansionReport("gorodetsky", main, shape, pre, "shape-only", details)


@dataclass(frozen=True)
class ConstantEstimate:
    name: str
    q: int
    l_max: int
    value: Any
    tail_estimate: Any


_CONSTANT_NAMES = {"inv_2_omega": "C_0", "inv_tau": "C_1"}


def constant_C(preset, q: int, l_max: int = 60, precision_bits: int = DEFAULT_PRECISION_BITS) -> ConstantEstimate:
    """Closed-form value of ``a(1/q)`` for ``inv_2_omega`` (C_0) or ``inv_tau`` (C_1).

    The product is summed in log form; ``tail_estimate`` extrapolates the
    geometric decay of the per-degree log terms past ``l_max``.
    """
    name = preset if isinstance(preset, str) else preset.name
    if name not in _CONSTANT_NAMES:
        raise ValueError(f"closed-form constants exist for {sorted(_CONSTANT_NAMES)}, not {name!r}")
    if l_max < 1:
        raise ValueError("l_max must be at least 1")
    ctx = ApproxField(precision_bits).ctx
    terms = []
    for l in range(1, l_max + 1):
        y = ctx.mpf(1) / ctx.power(q, l)
        if name == "inv_2_omega":
            # (2x - 1) / (2 sqrt(x^2 - x)) with x = q^l
            log_factor = ctx.log1p(-y / 2) - ctx.log1p(-y) / 2
        else:
            # sqrt(x^2 - x) ln(x / (x - 1))
            log_factor = ctx.log1p(-y) / 2 + ctx.log(-ctx.log1p(-y) / y)
        terms.append(pi_q(l, q) * log_factor)
    value = ctx.exp(ctx.fsum(terms))
    if len(terms) >= 2 and terms[-2] != 0:
        r = abs(terms[-1] / terms[-2])
        tail_log = abs(terms[-1]) * r / (1 - r) if r < 1 else ctx.inf
    else:
        tail_log = ctx.inf
    return ConstantEstimate(_CONSTANT_NAMES[name], q, l_max, value, value * ctx.expm1(tail_log))


def normalized_mean(profile: DProfile, T_value, N: int, q: int, *, precision_bits: int | None = None):
    """``T(N) / ((-1)^N binom(-d_1, N) q^N)`` as a float; its limit in ``N`` is ``a(1/q)``."""
    fld = _approx_for(profile, precision_bits)
    lead = binom_gen(-profile.d1, N) * (-1) ** N * profile.field.coerce(q) ** N
    if profile.exact:
        return fld.promote(Fraction(T_value) / lead)
    return fld.promote(T_value) / fld.promote(lead)


__all__ = [
    "AlBoundReport",
    "ConditionReport",
    "ConstantEstimate",
    "ExpansionReport",
    "Precondition",
    "a_series",
    "check_Al_bound",
    "check_conda",
    "check_propA",
    "check_propB",
    "constant_C",
    "gorodetsky_expand",
    "normalized_mean",
    "thm2_expand",
    "thm2_q_threshold",
]
