"""Sequences derived from a profile, plus the integer helpers they need.

``h`` is the exponent sequence with ``f(t) * prod_j (1 - t^j)^{h_j} = 1``;
``a`` holds the Taylor coefficients of ``log f``.  The two are linked by
``k a_k = sum_{d | k} d h_d``, and :func:`h_from_a_mobius` inverts that
relation independently of the annihilation route in :func:`h_from_d`.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction

from .algebra import Field, Series, series_binomial_pow, series_exp, series_mul
from .errors import NonIntegerResult
from .profiles import DProfile


def a_from_d(profile: DProfile, K: int) -> list:
    """``a_1..a_K`` from ``a_{n+1} = d_{n+1} - (1/(n+1)) sum_{k<=n} k a_k d_{n+1-k}``."""
    if K < 1:
        raise ValueError("K must be positive")
    d = profile.ds(K)
    a = [profile.field.zero]
    for n in range(K):
        s = (n + 1) * d[n + 1]
        for k in range(1, n + 1):
            if d[n + 1 - k]:
                s -= k * a[k] * d[n + 1 - k]
        a.append(s / (n + 1))
    return a[1:]


def h_from_d(profile: DProfile, K: int) -> list:
    """``h_1..h_K`` by sequential annihilation.

    At step ``k`` the running product ``f * prod_{j<k} (1-t^j)^{h_j}`` is
    ``1 + h_k t^k + ...``; multiplying by ``(1-t^k)^{h_k}`` clears that term.
    """
    if K < 1:
        raise ValueError("K must be positive")
    fld = profile.field
    g = Series.from_values(profile.ds(K), fld)
    h = []
    for k in range(1, K + 1):
        hk = g[k]
        h.append(hk)
        if hk and k < K:
            g = series_mul(g, series_binomial_pow(k, hk, K, fld))
    return h


def h_from_a_mobius(a: list, K: int) -> list:
    """``h_k = sum_{d | k} mu(d) a_{k/d} / d`` for ``k = 1..K``."""
    if len(a) < K:
        raise ValueError(f"need at least {K} a-coefficients, got {len(a)}")
    out = []
    for k in range(1, K + 1):
        s = 0 * a[0]
        for d in divisors(k):
            mu = mobius(d)
            if mu:
                s += mu * a[k // d - 1] / d
        out.append(s)
    return out


@dataclass(frozen=True)
class DerivedSequences:
    h: list
    a: list
    K: int


def derive(profile: DProfile, K: int) -> DerivedSequences:
    return DerivedSequences(h_from_d(profile, K), a_from_d(profile, K), K)


def _c_from(a: list, h: list, n: int, nu_max: int) -> list:
    out = []
    for nu in range(n + 1, nu_max + 1):
        s = a[nu - 1]
        for d in divisors(nu):
            if d > n:
                break
            s -= d * h[d - 1] / nu
        out.append(s)
    return out


def c_coeffs(profile: DProfile, n: int, nu_max: int) -> list:
    """``c_{n+1}..c_{nu_max}``, the log-coefficients of ``f * prod_{j<=n} (1-t^j)^{h_j}``."""
    if n < 1:
        raise ValueError("n must be positive")
    if nu_max < n + 1:
        raise ValueError("nu_max must be at least n+1")
    return _c_from(a_from_d(profile, nu_max), h_from_d(profile, n), n, nu_max)


def _cap_A_from_c(c: list, n: int, k: int, q: int, field: Field, *, scaled: bool = False):
    """``q^-k sum_{nu d delta = k, nu > n} mu(d) q^delta c_nu / (d delta)``; ``c[0]`` is ``c_{n+1}``.

    With ``scaled`` the leading ``q^-k`` is dropped.
    """
    total = field.zero
    for nu in divisors(k):
        if nu <= n:
            continue
        cnu = c[nu - n - 1]
        if not cnu:
            continue
        m = k // nu
        inner = Fraction(0)
        for d in divisors(m):
            mu = mobius(d)
            if mu:
                delta = m // d
                inner += Fraction(mu * q**delta, d * delta)
        if inner:
            if not scaled:
                inner /= Fraction(q) ** k
            total += cnu * (inner if field.exact else field.promote(inner))
    return total


def cap_A_list(profile: DProfile, n: int, q: int, K: int, *, scaled: bool = False) -> list:
    """``[A_0, ..., A_K]`` with ``A_k = 0`` for ``k <= n``; one derivation shared by all ``k``.

    ``scaled=True`` returns ``A_k q^k`` instead, which stays well conditioned
    in floating point.
    """
    if q < 2:
        raise ValueError("q must be at least 2")
    fld = profile.field
    out = [fld.zero] * (K + 1)
    if K <= n:
        return out
    c = c_coeffs(profile, n, K)
    for k in range(n + 1, K + 1):
        out[k] = _cap_A_from_c(c, n, k, q, fld, scaled=scaled)
    return out


def cap_A(profile: DProfile, n: int, k: int, q: int):
    """Coefficient of ``z^k`` in ``log prod_l f_{n+1}(z^l / q^l)^{pi_q(l)}``."""
    if k < n + 1:
        raise ValueError("k must be at least n+1")
    if q < 2:
        raise ValueError("q must be at least 2")
    return _cap_A_from_c(c_coeffs(profile, n, k), n, k, q, profile.field)


def cap_B(profile: DProfile, n: int, q: int, K: int) -> list:
    """``B_0..B_K`` from ``exp(sum_{k>n} A_k z^k) = sum B_k z^k``."""
    if K < 0:
        raise ValueError("K must be non-negative")
    return list(series_exp(Series(tuple(cap_A_list(profile, n, q, K)), profile.field)).coeffs)


def factorize_int(n: int) -> dict[int, int]:
    """Trial-division factorization of a positive integer."""
    if n < 1:
        raise ValueError("n must be positive")
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def mobius(d: int) -> int:
    """Moebius function; ``mobius(1) == 1``."""
    exps = factorize_int(d)
    if any(e > 1 for e in exps.values()):
        return 0
    return -1 if len(exps) % 2 else 1


def divisors(n: int) -> list[int]:
    """Sorted positive divisors of ``n``."""
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i * i != n:
                large.append(n // i)
        i += 1
    return small + large[::-1]


def divisor_count(n: int) -> int:
    return len(divisors(n))


_partition_lock = threading.Lock()
_partitions: list[int] = [1]


def partition_count(l: int) -> int:
    """Number of partitions of ``l`` by the pentagonal-number recurrence."""
    if l < 0:
        raise ValueError("l must be non-negative")
    with _partition_lock:
        p = _partitions
        for n in range(len(p), l + 1):
            total = 0
            k = 1
            while True:
                g1 = k * (3 * k - 1) // 2
                if g1 > n:
                    break
                sign = 1 if k % 2 else -1
                total += sign * p[n - g1]
                g2 = g1 + k
                if g2 <= n:
                    total += sign * p[n - g2]
                k += 1
            p.append(total)
        return p[l]


def partition_count_dp(l: int) -> int:
    """Partition count by the coin-change recurrence; independent of :func:`partition_count`."""
    if l < 0:
        raise ValueError("l must be non-negative")
    ways = [1] + [0] * l
    for part in range(1, l + 1):
        for total in range(part, l + 1):
            ways[total] += ways[total - part]
    return ways[l]


def pi_q(l: int, q: int) -> int:
    """Number of monic irreducible polynomials of degree ``l`` over F_q."""
    if l < 1:
        raise ValueError("l must be positive")
    if q < 2:
        raise ValueError("q must be at least 2")
    total = sum(mobius(d) * q ** (l // d) for d in divisors(l))
    count, rem = divmod(total, l)
    if rem or count <= 0:
        raise NonIntegerResult(f"necklace sum for l={l}, q={q} gave {total}/{l}")
    return count
