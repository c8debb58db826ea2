"""Brute-force mean values over F_p[T].

Every monic polynomial of degree N is enumerated, factored by trial
division against a sieve of irreducibles, and ``g`` is evaluated from the
exponents of its factorization.  This is deliberately naive: it is the
ground truth the closed-form and Euler-product computations are checked
against.

Monic polynomials of degree ``n`` are indexed by an integer code in
``[0, p**n)`` whose base-``p`` digits, least significant first, are the
coefficients of ``T**0 .. T**(n-1)``; code order is lexicographic in
``(c_{n-1}, ..., c_0)``.
"""

from __future__ import annotations

import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import BudgetExceeded, NonPrimeModulus, TableTooShallow
from .profiles import DProfile

log = logging.getLogger(__name__)

DEFAULT_WORK_BUDGET = 10**8
_BLOCK_ROWS = 1 << 14


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _require_prime(p: int) -> None:
    if not is_prime(p):
        raise NonPrimeModulus(f"modulus {p} is not prime; the oracle works over prime fields only")


@dataclass(frozen=True, order=True)
class FpPoly:
    """Polynomial over F_p with ``coeffs[i]`` the coefficient of ``T**i``."""

    p: int
    coeffs: tuple

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("use (1,) for the unit polynomial; the zero polynomial is not supported")
        if any(not 0 <= c < self.p for c in self.coeffs):
            raise ValueError(f"coefficients must lie in [0, {self.p})")
        if self.coeffs[-1] == 0:
            raise ValueError("leading coefficient must be nonzero")

    @classmethod
    def from_code(cls, p: int, n: int, code: int) -> "FpPoly":
        digits = []
        for _ in range(n):
            code, r = divmod(code, p)
            digits.append(r)
        return cls(p, tuple(digits) + (1,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_monic(self) -> bool:
        return self.coeffs[-1] == 1

    @property
    def code(self) -> int:
        """Index among monic polynomials of the same degree."""
        if not self.is_monic:
            raise ValueError("only monic polynomials have a code")
        c = 0
        for x in reversed(self.coeffs[:-1]):
            c = c * self.p + x
        return c

    def __mul__(self, other: "FpPoly") -> "FpPoly":
        if other.p != self.p:
            raise ValueError("moduli differ")
        return FpPoly(self.p, _mul(self.coeffs, other.coeffs, self.p))

    def __pow__(self, e: int) -> "FpPoly":
        out = FpPoly(self.p, (1,))
        for _ in range(e):
            out = out * self
        return out

    def divmod_monic(self, divisor: "FpPoly") -> tuple[tuple, tuple]:
        """Quotient and remainder coefficient tuples for a monic divisor (remainder may be empty)."""
        return _divmod_monic(self.coeffs, divisor.coeffs, self.p)

    def __str__(self) -> str:
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            mono = "1" if i == 0 else ("T" if i == 1 else f"T^{i}")
            if i == 0:
                terms.append(str(c))
            else:
                terms.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(terms)


def _mul(a: tuple, b: tuple, p: int) -> tuple:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return tuple(c % p for c in out)


def _divmod_monic(a: tuple, b: tuple, p: int) -> tuple[tuple, tuple]:
    r = list(a)
    db = len(b) - 1
    if len(r) - 1 < db:
        return (), tuple(_strip(r))
    q = [0] * (len(r) - db)
    for j in range(len(r) - 1, db - 1, -1):
        c = r[j] % p
        if c:
            q[j - db] = c
            for i in range(db + 1):
                r[j - db + i] = (r[j - db + i] - c * b[i]) % p
        r[j] = 0
    return tuple(q), tuple(_strip([x % p for x in r[:db]]))


def _strip(c: list) -> list:
    while c and c[-1] == 0:
        c.pop()
    return c


def enumerate_monic(p: int, n: int) -> Iterator[FpPoly]:
    """All ``p**n`` monic polynomials of degree ``n`` in code order."""
    _require_prime(p)
    if n < 0:
        raise ValueError("degree must be non-negative")
    for code in range(p**n):
        yield FpPoly.from_code(p, n, code)


def _code_digits(p: int, n: int, start: int, stop: int) -> np.ndarray:
    """Coefficient matrix (rows = codes in [start, stop)) with the leading 1 in column n."""
    codes = np.arange(start, stop, dtype=np.int64)
    out = np.empty((stop - start, n + 1), dtype=np.int64)
    for i in range(n):
        codes, out[:, i] = np.divmod(codes, p)
    out[:, n] = 1
    return out


@dataclass(frozen=True)
class IrreducibleTable:
    p: int
    max_degree: int
    by_degree: dict

    def of_degree(self, l: int) -> tuple:
        if l > self.max_degree:
            raise TableTooShallow(f"table stops at degree {self.max_degree}, degree {l} requested")
        return self.by_degree[l]

    def count(self, l: int) -> int:
        return len(self.of_degree(l))


def irreducible_sieve(p: int, max_degree: int) -> IrreducibleTable:
    """Monic irreducibles up to ``max_degree``: whatever is not a product of lower ones."""
    _require_prime(p)
    if max_degree < 1:
        raise ValueError("max_degree must be at least 1")
    by_degree: dict[int, tuple] = {}
    for l in range(1, max_degree + 1):
        reducible = np.zeros(p**l, dtype=bool)
        powers = p ** np.arange(l, dtype=np.int64)
        for a in range(1, l // 2 + 1):
            cof = _code_digits(p, l - a, 0, p ** (l - a))
            for P in by_degree[a]:
                prod = np.zeros((cof.shape[0], l + 1), dtype=np.int64)
                for i, c in enumerate(P.coeffs):
                    if c:
                        prod[:, i : i + l - a + 1] += c * cof
                prod %= p
                reducible[prod[:, :l] @ powers] = True
        by_degree[l] = tuple(FpPoly.from_code(p, l, int(c)) for c in np.flatnonzero(~reducible))
    return IrreducibleTable(p, max_degree, by_degree)


@dataclass(frozen=True)
class Factorization:
    """Factors ``(P, e)`` sorted by degree then code; empty for the unit polynomial."""

    p: int
    factors: tuple

    def product(self) -> FpPoly:
        out = FpPoly(self.p, (1,))
        for P, e in self.factors:
            out = out * P**e
        return out

    @property
    def exponents(self) -> tuple:
        return tuple(e for _, e in self.factors)


def factor(F: FpPoly, table: IrreducibleTable) -> Factorization:
    """Trial division by irreducibles of degree up to ``deg F / 2``; a leftover is irreducible."""
    if not F.is_monic:
        raise ValueError("only monic polynomials are factored")
    if table.p != F.p:
        raise ValueError("table modulus differs from polynomial modulus")
    if F.degree // 2 > table.max_degree:
        raise TableTooShallow(f"degree {F.degree} needs irreducibles up to degree {F.degree // 2}")
    p = F.p
    rest = F.coeffs
    found = []
    d = 1
    while 2 * d <= len(rest) - 1:
        for P in table.of_degree(d):
            e = 0
            while len(rest) - 1 >= d:
                q, r = _divmod_monic(rest, P.coeffs, p)
                if r:
                    break
                rest = q
                e += 1
            if e:
                found.append((P, e))
        d += 1
    if len(rest) > 1:
        found.append((FpPoly(p, rest), 1))
    found.sort(key=lambda pe: (pe[0].degree, pe[0].code))
    fz = Factorization(p, tuple(found))
    if fz.product() != F:
        raise AssertionError(f"factorization of {F} does not reconstruct it")
    return fz


def eval_g(profile: DProfile, fz: Factorization):
    """``prod_i d(e_i)``; the empty product is 1."""
    v = profile.field.one
    for e in fz.exponents:
        v = v * profile.d(e)
    return v


def _residue_matrix(N: int, polys: tuple, p: int) -> np.ndarray:
    """Column block ``i`` holds ``T**j mod P_i`` for ``j = 0..N``, so ``R @ W`` gives all remainders."""
    d = polys[0].degree
    W = np.zeros((N + 1, d * len(polys)), dtype=np.float64)
    for i, P in enumerate(polys):
        r = [0] * d
        r[0] = 1
        for j in range(N + 1):
            W[j, i * d : (i + 1) * d] = r
            # multiply by T and reduce with the monic P
            top = r[-1]
            r = [0] + r[:-1]
            if top:
                r = [(x - top * c) % p for x, c in zip(r, P.coeffs[:d])]
    return W


def _signature_histogram(p: int, N: int, table: IrreducibleTable, start: int, stop: int) -> Counter:
    """Count polynomials in a code block by exponent signature.

    A signature is the tuple ``(n_1, ..., n_N)`` with ``n_e`` the number of
    distinct prime factors appearing to exactly the ``e``-th power.
    """
    residues = {d: _residue_matrix(N, table.of_degree(d), p) for d in range(1, N // 2 + 1)}
    hist: Counter = Counter()
    for lo in range(start, stop, _BLOCK_ROWS):
        hi = min(stop, lo + _BLOCK_ROWS)
        R = _code_digits(p, N, lo, hi)
        deg = np.full(hi - lo, N, dtype=np.int64)
        counts = np.zeros((hi - lo, N + 1), dtype=np.int64)
        for d in range(1, N // 2 + 1):
            idx = np.flatnonzero(deg >= 2 * d)
            if idx.size == 0:
                break
            polys = table.of_degree(d)
            rem = np.fmod(R[idx].astype(np.float64) @ residues[d], p)
            divisible = ~rem.reshape(idx.size, len(polys), d).any(axis=2)
            # distinct irreducibles are coprime, so dividing out one leaves
            # divisibility by the others unchanged
            for i in np.flatnonzero(divisible.any(axis=0)):
                pc = np.array(polys[i].coeffs, dtype=np.int64)
                rows = idx[divisible[:, i]]
                e = 0
                while rows.size:
                    quot, ok = _divide_rows(R[rows], pc, p)
                    if e == 0 and not ok.all():
                        raise AssertionError("residue test and long division disagree")
                    rows = rows[ok]
                    R[rows] = quot[ok]
                    deg[rows] -= d
                    e += 1
                    counts[rows, e - 1] -= 1
                    counts[rows, e] += 1
                    rows = rows[deg[rows] >= d]
        counts[deg >= 1, 1] += 1
        sigs, mult = np.unique(counts[:, 1:], axis=0, return_counts=True)
        for s, m in zip(sigs, mult):
            hist[tuple(int(x) for x in s)] += int(m)
    return hist


def _divide_rows(R: np.ndarray, pc: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Divide each row polynomial by the monic ``pc``; return quotients and a divisibility mask."""
    R = R.copy()
    n = R.shape[1] - 1
    d = pc.size - 1
    Q = np.zeros_like(R)
    for j in range(n, d - 1, -1):
        c = R[:, j]
        if not c.any():
            continue
        Q[:, j - d] = c
        R[:, j - d : j + 1] = (R[:, j - d : j + 1] - c[:, None] * pc[None, :]) % p
    return Q, ~R[:, :d].any(axis=1)


def _sum_histogram(profile: DProfile, hist: Counter):
    total = profile.field.zero
    for sig in sorted(hist):
        term = profile.field.one
        for e, n_e in enumerate(sig, start=1):
            if n_e:
                term = term * profile.d(e) ** n_e
        total += hist[sig] * term
    return total


def _scalar_block(profile: DProfile, p: int, N: int, table: IrreducibleTable, start: int, stop: int):
    total = profile.field.zero
    for code in range(start, stop):
        total += eval_g(profile, factor(FpPoly.from_code(p, N, code), table))
    return total


def _check_budget(p: int, N: int, work_budget: int) -> None:
    size = p**N
    if size > work_budget:
        raise BudgetExceeded(f"{p}^{N} = {size} factorizations exceeds the budget of {work_budget}")


def _prefix_blocks(p: int, N: int, workers: int) -> list[tuple[int, int]]:
    """Code ranges sharing their leading coefficients, at least ``4 * workers`` of them when possible."""
    prefix = 0
    while prefix < N and p**prefix < 4 * max(1, workers):
        prefix += 1
    step = p ** (N - prefix)
    return [(b * step, (b + 1) * step) for b in range(p**prefix)]


def _run_blocks(run, blocks, workers: int) -> list:
    if workers <= 1:
        return [run(b) for b in blocks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, blocks))


def signature_histogram(
    p: int,
    N: int,
    *,
    workers: int = 1,
    work_budget: int = DEFAULT_WORK_BUDGET,
    table: IrreducibleTable | None = None,
) -> Counter:
    """How many monic degree-``N`` polynomials have each exponent signature.

    This is independent of ``g``, so one enumeration serves every profile.
    """
    _require_prime(p)
    if N < 1:
        raise ValueError("N must be positive")
    _check_budget(p, N, work_budget)
    if table is None:
        table = irreducible_sieve(p, max(1, N // 2))
    blocks = _prefix_blocks(p, N, workers)
    log.debug("signature_histogram p=%d N=%d: %d blocks, %d workers", p, N, len(blocks), workers)
    hist: Counter = Counter()
    for part in _run_blocks(lambda b: _signature_histogram(p, N, table, *b), blocks, workers):
        hist.update(part)
    return hist


def brute_T(
    profile: DProfile,
    p: int,
    N: int,
    *,
    workers: int = 1,
    work_budget: int = DEFAULT_WORK_BUDGET,
    method: str = "vectorized",
    table: IrreducibleTable | None = None,
    histogram: Counter | None = None,
):
    """Exact ``sum g(F)`` over monic ``F`` of degree ``N`` in F_p[T].

    The code range is split into blocks that fix the leading coefficients;
    blocks are processed independently and their partial results combined
    in block order, so the answer does not depend on ``workers``.
    ``method="scalar"`` factors one polynomial at a time with :func:`factor`;
    a precomputed ``histogram`` from :func:`signature_histogram` skips the
    enumeration entirely.
    """
    _require_prime(p)
    if N < 1:
        raise ValueError("N must be positive")
    _check_budget(p, N, work_budget)
    if histogram is not None:
        return _sum_histogram(profile, histogram)
    if method == "vectorized":
        hist = signature_histogram(p, N, workers=workers, work_budget=work_budget, table=table)
        return _sum_histogram(profile, hist)
    if method != "scalar":
        raise ValueError(f"unknown method {method!r}")
    if table is None:
        table = irreducible_sieve(p, max(1, N // 2))
    blocks = _prefix_blocks(p, N, workers)
    total = profile.field.zero
    for part in _run_blocks(lambda b: _scalar_block(profile, p, N, table, *b), blocks, workers):
        total += part
    return total
