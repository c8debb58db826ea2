"""Exact mean values ``T(N) = sum_{deg F = N, F monic} g(F)``.

Two independent routes:

* :func:`T_poly_thm1` builds ``T(N)`` as a polynomial in ``q`` whose
  coefficients are sums over partitions, using only the h-sequence.
* :func:`T_exact_euler` fixes ``q`` and extracts the coefficient of ``u^N``
  from the truncated Euler product ``prod_l f(u^l)^{pi_q(l)}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from .algebra import BinomialCache, PolyInQ, Series, poly_in_q_eval, series_mul, series_pow, series_substitute_power
from .errors import FloatProfileNotSupported, MismatchDetected
from .profiles import DProfile
from .sequences import h_from_d, pi_q


def partition_tuples(l: int) -> Iterator[dict[int, int]]:
    """Every solution of ``sum_{j>=2} (j-1) k_j = l`` as ``{j: k_j}`` with zero entries omitted.

    Solutions correspond to partitions of ``l`` (part ``j-1`` used ``k_j``
    times) and come out with the largest part decided first.
    """

    def rec(remaining: int, largest: int):
        if remaining == 0:
            yield {}
            return
        if largest == 0:
            return
        for k in range(remaining // largest, -1, -1):
            for rest in rec(remaining - k * largest, largest - 1):
                if k:
                    out = {largest + 1: k}
                    out.update(rest)
                    yield out
                else:
                    yield rest

    yield from rec(l, l)


def _signed_binom(binom, h, k: int):
    v = binom(-h, k)
    return -v if k % 2 else v


def A_l_of_N(
    profile: DProfile,
    l: int,
    N: int,
    *,
    h: list | None = None,
    binom: BinomialCache | None = None,
    stats: dict | None = None,
):
    """Coefficient of ``q^{N-l}`` in ``T(N)``; it does not depend on ``q``.

    ``h`` may carry a precomputed h-sequence of length at least ``l+1``.
    When ``stats`` is given, ``stats["tuples"]`` receives the number of
    partition tuples visited.
    """
    if not 0 <= l <= N - 1:
        raise ValueError(f"need 0 <= l <= N-1, got l={l}, N={N}")
    if h is None:
        h = h_from_d(profile, l + 1)
    if binom is None:
        binom = BinomialCache()
    total = profile.field.zero
    visited = 0
    for ks in partition_tuples(l):
        visited += 1
        k1 = N - l - sum(ks.values())
        if k1 < 0:
            continue
        term = _signed_binom(binom, h[0], k1)
        for j, k in ks.items():
            term = term * _signed_binom(binom, h[j - 1], k)
        total += term
    if stats is not None:
        stats["tuples"] = visited
    return total


@dataclass(frozen=True)
class MeanValuePoly:
    N: int
    poly: PolyInQ
    coeffs: tuple

    def __call__(self, q) -> Fraction:
        return poly_in_q_eval(self.poly, q)

    def __str__(self) -> str:
        return str(self.poly)


def T_poly_thm1(profile: DProfile, N: int) -> MeanValuePoly:
    """``T(N) = sum_{l<N} A_l(N) q^{N-l}`` with exact rational coefficients."""
    if N < 1:
        raise ValueError("N must be positive")
    if not profile.exact:
        raise FloatProfileNotSupported(f"{profile.label} is float-valued; a polynomial in q needs exact coefficients")
    h = h_from_d(profile, N)
    binom = BinomialCache()
    coeffs = tuple(A_l_of_N(profile, l, N, h=h, binom=binom) for l in range(N))
    return MeanValuePoly(N, PolyInQ({N - l: c for l, c in enumerate(coeffs)}), coeffs)


def euler_product_series(profile: DProfile, N: int, q: int) -> Series:
    """``prod_{l<=N} f(u^l)^{pi_q(l)}`` to order ``N``; coefficient ``k`` is ``T(k)``."""
    if N < 0:
        raise ValueError("N must be non-negative")
    if q < 2:
        raise ValueError("q must be at least 2")
    fld = profile.field
    f = Series.from_values(profile.ds(N), fld)
    acc = Series.one(N, fld)
    for l in range(1, N + 1):
        # f(u^l) is 1 mod u^{N+1} once l > N
        factor = series_pow(f.truncate(N // l), pi_q(l, q))
        acc = series_mul(acc, series_substitute_power(factor, l, order=N))
    return acc


def T_exact_euler(profile: DProfile, N: int, q: int):
    """``T(N)`` at a fixed integer ``q >= 2`` by Euler-product coefficient extraction."""
    if N < 1:
        raise ValueError("N must be positive")
    return euler_product_series(profile, N, q)[N]


@dataclass(frozen=True)
class CrosscheckEntry:
    q: int
    N: int
    poly_value: Fraction
    euler_value: Fraction

    @property
    def ok(self) -> bool:
        return self.poly_value == self.euler_value


@dataclass(frozen=True)
class CrosscheckReport:
    profile: str
    entries: tuple

    @property
    def passed(self) -> bool:
        return all(e.ok for e in self.entries)

    @property
    def first_failure(self) -> CrosscheckEntry | None:
        return next((e for e in self.entries if not e.ok), None)


def crosscheck_exact(profile: DProfile, N: int | Iterable[int], q_list: Iterable[int], *, strict: bool = True) -> CrosscheckReport:
    """Compare the polynomial route evaluated at each ``q`` with the Euler-product route.

    ``N`` may be a single degree or an iterable of degrees.  With ``strict``
    the first disagreement raises :class:`MismatchDetected`.
    """
    Ns = [N] if isinstance(N, int) else list(N)
    q_list = list(q_list)
    entries = []
    for n in Ns:
        poly = T_poly_thm1(profile, n)
        for q in q_list:
            if q < 2:
                raise ValueError("q must be at least 2")
            euler = euler_product_series(profile, n, q)[n]
            entry = CrosscheckEntry(q, n, poly(q), euler)
            if strict and not entry.ok:
                raise MismatchDetected(q, n, entry.poly_value, entry.euler_value, label=f"{profile.label} poly/euler")
            entries.append(entry)
    return CrosscheckReport(profile.label, tuple(entries))
