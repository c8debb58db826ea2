"""Coefficient fields, generalized binomials and truncated power series.

Two coefficient fields are supported.  :data:`EXACT` holds
:class:`fractions.Fraction` values and never rounds.  :class:`ApproxField`
holds :mod:`mpmath` floats whose precision is fixed when the field is
created (128 bits unless asked otherwise).  A series knows its field and
operations refuse to combine series from different fields; moving from exact
to approximate is done explicitly with :func:`promote`.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

from mpmath.ctx_mp import MPContext

from .errors import FieldMismatch, NonUnitConstantTerm, NonZeroConstantTerm

DEFAULT_PRECISION_BITS = 128


class ExactField:
    """Rational numbers with unbounded numerators and denominators."""

    exact = True
    precision_bits = None

    def coerce(self, x):
        if type(x) is Fraction:
            return x
        if isinstance(x, int) and not isinstance(x, bool):
            return Fraction(x)
        raise FieldMismatch(f"cannot use {type(x).__name__} value {x!r} as an exact coefficient")

    def is_member(self, x) -> bool:
        return type(x) is Fraction

    @property
    def zero(self) -> Fraction:
        return Fraction(0)

    @property
    def one(self) -> Fraction:
        return Fraction(1)

    def __repr__(self) -> str:
        return "EXACT"

    def __reduce__(self):
        return "EXACT"


EXACT = ExactField()

_approx_lock = threading.Lock()
_approx_fields: dict[int, "ApproxField"] = {}


class ApproxField:
    """Binary floating point at a fixed precision, backed by its own mpmath context.

    Instances are interned per precision, so ``ApproxField(128) is ApproxField(128)``.
    """

    exact = False

    def __new__(cls, precision_bits: int = DEFAULT_PRECISION_BITS):
        precision_bits = int(precision_bits)
        if precision_bits < 8:
            raise ValueError("precision_bits must be at least 8")
        with _approx_lock:
            field = _approx_fields.get(precision_bits)
            if field is None:
                field = super().__new__(cls)
                ctx = MPContext()
                ctx.prec = precision_bits
                field.ctx = ctx
                field.precision_bits = precision_bits
                _approx_fields[precision_bits] = field
        return field

    def __getnewargs__(self):
        return (self.precision_bits,)

    def coerce(self, x):
        if isinstance(x, self.ctx.mpf):
            return x
        if isinstance(x, int) and not isinstance(x, bool):
            return self.ctx.mpf(x)
        raise FieldMismatch(
            f"cannot use {type(x).__name__} value {x!r} as a {self.precision_bits}-bit coefficient;"
            " promote it explicitly"
        )

    def promote(self, x):
        """Convert an exact, integer, float or foreign-precision value into this field."""
        if isinstance(x, self.ctx.mpf):
            return x
        if isinstance(x, Fraction):
            return self.ctx.fdiv(x.numerator, x.denominator)
        if isinstance(x, (int, float, str)):
            return self.ctx.mpf(x)
        # mpf from another context
        return self.ctx.mpf(x)

    def is_member(self, x) -> bool:
        return isinstance(x, self.ctx.mpf)

    @property
    def zero(self):
        return self.ctx.mpf(0)

    @property
    def one(self):
        return self.ctx.mpf(1)

    def __repr__(self) -> str:
        return f"ApproxField({self.precision_bits})"


Field = Union[ExactField, ApproxField]


def field_of(x) -> Field:
    """Infer the field a scalar belongs to (ints count as exact)."""
    if isinstance(x, (Fraction, int)) and not isinstance(x, bool):
        return EXACT
    prec = getattr(getattr(x, "context", None), "prec", None)
    if prec is None:
        raise FieldMismatch(f"unsupported coefficient type {type(x).__name__}")
    field = ApproxField(prec)
    if not field.is_member(x):
        raise FieldMismatch(f"value {x!r} does not belong to an interned approximate field")
    return field


def promote(value, field: Field):
    """Explicit one-way promotion of a scalar or a :class:`Series` into ``field``."""
    if isinstance(value, Series):
        if value.field is field:
            return value
        if field.exact:
            raise FieldMismatch("approximate series cannot be demoted to exact")
        return Series(tuple(field.promote(c) for c in value.coeffs), field)
    if field.exact:
        return EXACT.coerce(value)
    return field.promote(value)


def binom_gen(x, k: int):
    """Generalized binomial coefficient ``x (x-1) ... (x-k+1) / k!``.

    ``x`` may be an int, a :class:`Fraction` or an approximate float; the result
    lives in the same field.

    >>> binom_gen(Fraction(-1, 2), 2)
    Fraction(3, 8)
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    field = field_of(x)
    if field.exact:
        x = Fraction(x)
        a, b = x.numerator, x.denominator
        num = 1
        den = 1
        for i in range(k):
            num *= a - i * b
            den *= (i + 1) * b
        return Fraction(num, den)
    result = field.one
    for i in range(k):
        result = result * (x - i) / (i + 1)
    return result


class BinomialCache:
    """Memo table for :func:`binom_gen`, safe for concurrent insertion."""

    def __init__(self):
        self._table: dict = {}
        self._lock = threading.Lock()

    def __call__(self, x, k: int):
        key = (x, k)
        value = self._table.get(key)
        if value is None:
            value = binom_gen(x, k)
            with self._lock:
                self._table.setdefault(key, value)
        return value

    def __len__(self) -> int:
        return len(self._table)


@dataclass(frozen=True)
class Series:
    """Power series known up to and including ``t**order``.

    Coefficients past ``order`` are unknown rather than zero, so every
    operation returns a result whose order is the smallest order it can
    guarantee.
    """

    coeffs: tuple
    field: Field = EXACT

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("a series needs at least a constant term")
        for c in self.coeffs:
            if not self.field.is_member(c):
                raise FieldMismatch(f"coefficient {c!r} is not in {self.field!r}")

    @classmethod
    def from_values(cls, values: Iterable, field: Field = EXACT, order: int | None = None) -> "Series":
        """Build a series from numbers; ``order`` pads with known zeros or truncates."""
        coeffs = [field.coerce(v) for v in values]
        if order is not None:
            if order < 0:
                raise ValueError("order must be non-negative")
            coeffs = coeffs[: order + 1] + [field.zero] * (order + 1 - len(coeffs))
        return cls(tuple(coeffs), field)

    @classmethod
    def one(cls, order: int, field: Field = EXACT) -> "Series":
        return cls.from_values([1], field, order)

    @classmethod
    def zero(cls, order: int, field: Field = EXACT) -> "Series":
        return cls.from_values([], field, order)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int):
        if not 0 <= k <= self.order:
            raise IndexError(f"coefficient t^{k} is beyond the known order {self.order}")
        return self.coeffs[k]

    def __iter__(self):
        return iter(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def truncate(self, order: int) -> "Series":
        if order > self.order:
            raise ValueError(f"cannot extend a series of order {self.order} to order {order}")
        return Series(self.coeffs[: order + 1], self.field)

    def _check(self, other: "Series") -> None:
        if not isinstance(other, Series):
            raise TypeError(f"expected Series, got {type(other).__name__}")
        if other.field is not self.field:
            raise FieldMismatch(f"cannot combine {self.field!r} and {other.field!r} series")

    def __add__(self, other: "Series") -> "Series":
        self._check(other)
        m = min(self.order, other.order)
        return Series(tuple(self.coeffs[k] + other.coeffs[k] for k in range(m + 1)), self.field)

    def __sub__(self, other: "Series") -> "Series":
        self._check(other)
        m = min(self.order, other.order)
        return Series(tuple(self.coeffs[k] - other.coeffs[k] for k in range(m + 1)), self.field)

    def __neg__(self) -> "Series":
        return Series(tuple(-c for c in self.coeffs), self.field)

    def __mul__(self, other: "Series") -> "Series":
        return series_mul(self, other)

    def scale(self, c) -> "Series":
        c = self.field.coerce(c)
        return Series(tuple(c * x for x in self.coeffs), self.field)

    def derivative(self) -> "Series":
        """Term-by-term derivative; the known order drops by one."""
        if self.order == 0:
            raise ValueError("derivative of an order-0 series carries no information")
        return Series(tuple(k * self.coeffs[k] for k in range(1, self.order + 1)), self.field)

    def evaluate(self, x):
        """Horner evaluation of the truncated polynomial at ``x``."""
        x = self.field.coerce(x)
        acc = self.field.zero
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __repr__(self) -> str:
        terms = ", ".join(str(c) for c in self.coeffs)
        return f"Series([{terms}], order={self.order}, field={self.field!r})"


def series_mul(a: Series, b: Series) -> Series:
    """Cauchy product truncated to ``min(a.order, b.order)``."""
    a._check(b)
    m = min(a.order, b.order)
    ac, bc = a.coeffs, b.coeffs
    zero = a.field.zero
    # skip zero coefficients: sparse inputs (substituted series) are common
    nz_a = [(i, c) for i, c in enumerate(ac[: m + 1]) if c]
    out = [zero] * (m + 1)
    for i, c in nz_a:
        for j in range(m + 1 - i):
            y = bc[j]
            if y:
                out[i + j] += c * y
    return Series(tuple(out), a.field)


def series_log(a: Series) -> Series:
    """Logarithm of a series with constant term 1.

    Uses ``k b_k = k a_k - sum_{j<k} j b_j a_{k-j}``, which comes from
    ``b' a = a'``.
    """
    if a.coeffs[0] != 1:
        raise NonUnitConstantTerm(f"log needs constant term 1, got {a.coeffs[0]}")
    ac = a.coeffs
    b = [a.field.zero] * (a.order + 1)
    for k in range(1, a.order + 1):
        s = k * ac[k]
        for j in range(1, k):
            if ac[k - j]:
                s -= j * b[j] * ac[k - j]
        b[k] = s / k
    return Series(tuple(b), a.field)


def series_exp(a: Series) -> Series:
    """Exponential of a series with constant term 0 (``k e_k = sum_j j a_j e_{k-j}``)."""
    if a.coeffs[0] != 0:
        raise NonZeroConstantTerm(f"exp needs constant term 0, got {a.coeffs[0]}")
    ac = a.coeffs
    nz = [(j, j * c) for j, c in enumerate(ac) if j and c]
    e = [a.field.zero] * (a.order + 1)
    e[0] = a.field.one
    for k in range(1, a.order + 1):
        s = a.field.zero
        for j, jc in nz:
            if j > k:
                break
            s += jc * e[k - j]
        e[k] = s / k
    return Series(tuple(e), a.field)


def series_pow(a: Series, m) -> Series:
    """``a ** m`` for a series with constant term 1 and any exponent in the field.

    Integer exponents keep the result in the field of ``a``; this is the
    recurrence ``k P_k = sum_j ((m+1) j - k) a_j P_{k-j}`` and never takes a log.
    """
    if a.coeffs[0] != 1:
        raise NonUnitConstantTerm(f"power needs constant term 1, got {a.coeffs[0]}")
    if not (isinstance(m, int) and not isinstance(m, bool)):
        m = a.field.coerce(m)
    ac = a.coeffs
    nz = [(j, c) for j, c in enumerate(ac) if j and c]
    p = [a.field.zero] * (a.order + 1)
    p[0] = a.field.one
    m1 = m + 1
    for k in range(1, a.order + 1):
        s = a.field.zero
        for j, c in nz:
            if j > k:
                break
            s += (m1 * j - k) * c * p[k - j]
        p[k] = s / k
    return Series(tuple(p), a.field)


def series_binomial_pow(m: int, h, order: int, field: Field | None = None) -> Series:
    """Expansion of ``(1 - t**m) ** h`` to the given order.

    The coefficient of ``t**(m k)`` is ``(-1)**k binom_gen(h, k)``.
    """
    if m < 1:
        raise ValueError("m must be a positive integer")
    if order < 0:
        raise ValueError("order must be non-negative")
    if field is None:
        field = field_of(h)
    h = field.coerce(h)
    out = [field.zero] * (order + 1)
    c = field.one
    out[0] = c
    for k in range(1, order // m + 1):
        c = -c * (h - (k - 1)) / k
        out[m * k] = c
    return Series(tuple(out), field)


def series_substitute_power(a: Series, l: int, order: int | None = None, scale=None) -> Series:
    """Substitute ``t -> s * x**l`` (``s`` defaults to 1).

    A series known to order ``M`` becomes known to order ``l*(M+1) - 1`` in
    ``x``; ``order`` may only truncate below that.
    """
    if l < 1:
        raise ValueError("l must be a positive integer")
    valid = l * (a.order + 1) - 1
    if order is None:
        order = valid
    elif order > valid:
        raise ValueError(f"substitution only determines coefficients up to x^{valid}, not x^{order}")
    field = a.field
    s = field.one if scale is None else field.coerce(scale)
    out = [field.zero] * (order + 1)
    power = field.one
    for k in range(order // l + 1):
        out[l * k] = a.coeffs[k] * power
        power = power * s
    return Series(tuple(out), field)


@dataclass(frozen=True)
class PolyInQ:
    """Polynomial in ``q`` with rational coefficients, stored sparsely without zeros."""

    coeffs_by_power: Mapping[int, Fraction]

    def __post_init__(self):
        clean = {}
        for e, c in dict(self.coeffs_by_power).items():
            if e < 0:
                raise ValueError("exponents must be non-negative")
            c = EXACT.coerce(c)
            if c:
                clean[int(e)] = c
        object.__setattr__(self, "coeffs_by_power", dict(sorted(clean.items(), reverse=True)))

    def coeff(self, e: int) -> Fraction:
        return self.coeffs_by_power.get(e, Fraction(0))

    @property
    def degree(self) -> int:
        return max(self.coeffs_by_power, default=-1)

    def __call__(self, q) -> Fraction:
        return poly_in_q_eval(self, q)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyInQ):
            return NotImplemented
        return self.coeffs_by_power == other.coeffs_by_power

    def __hash__(self) -> int:
        return hash(tuple(self.coeffs_by_power.items()))

    def __str__(self) -> str:
        if not self.coeffs_by_power:
            return "0"
        parts = []
        for e, c in self.coeffs_by_power.items():
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if e == 0:
                body = str(mag)
            else:
                mono = "q" if e == 1 else f"q^{e}"
                body = mono if mag == 1 else f"{mag}*{mono}"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out


def poly_in_q_eval(p: PolyInQ, q) -> Fraction:
    """Exact value of ``p`` at an integer or rational ``q``."""
    q = EXACT.coerce(q)
    total = Fraction(0)
    for e, c in p.coeffs_by_power.items():
        total += c * q**e
    return total
