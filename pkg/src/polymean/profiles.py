"""Prime-power profiles ``d_k = g(P**k)`` and the preset catalog.

A multiplicative function on monic polynomials over F_q is fixed by the
values it takes on prime powers, and those values depend only on the
exponent.  :class:`DProfile` wraps that sequence together with the
coefficient field it lives in.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Any, Callable, Sequence

from .algebra import DEFAULT_PRECISION_BITS, EXACT, ApproxField, Field
from .errors import UnknownPreset


@dataclass(frozen=True, eq=False)
class DProfile:
    """The sequence ``d_1, d_2, ...`` with ``d_0 = 1`` implied."""

    name: str
    params: tuple
    field: Field
    rule: Callable[[int], Any] = field(repr=False)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    @property
    def exact(self) -> bool:
        return self.field.exact

    def d(self, k: int):
        if k < 0:
            raise ValueError("k must be non-negative")
        if k == 0:
            return self.field.one
        value = self._cache.get(k)
        if value is None:
            value = self.field.coerce(self.rule(k))
            with self._lock:
                self._cache.setdefault(k, value)
        return value

    def ds(self, K: int) -> list:
        """``[d_0, d_1, ..., d_K]``."""
        return [self.d(k) for k in range(K + 1)]

    @property
    def d1(self):
        return self.d(1)

    def promote(self, target: Field) -> "DProfile":
        """Same profile with values moved into ``target`` (exact to approximate only)."""
        if target is self.field:
            return self
        if target.exact:
            raise ValueError("cannot demote an approximate profile to exact")
        rule = self.rule
        src = self.field

        def promoted(k: int):
            v = rule(k)
            return target.promote(src.coerce(v) if src.exact else v)

        return DProfile(self.name, self.params, target, promoted)

    @property
    def label(self) -> str:
        if not self.params:
            return self.name
        inner = ", ".join(f"{k}={_fmt(v)}" for k, v in self.params)
        return f"{self.name}({inner})"

    def __repr__(self) -> str:
        return f"DProfile({self.label}, {self.field!r})"


def _fmt(v) -> str:
    if isinstance(v, (list, tuple)):
        return "[" + ",".join(_fmt(x) for x in v) + "]"
    return str(v)


def _as_number(v):
    """Ints, Fractions and decimal strings become exact; floats stay floats."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int) and not isinstance(v, bool):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v.strip())
    if isinstance(v, float):
        return v
    raise UnknownPreset(f"cannot interpret parameter value {v!r}")


def _as_int(v, name: str, minimum: int) -> int:
    x = Fraction(_as_number(v))
    if x.denominator != 1 or x < minimum:
        raise UnknownPreset(f"parameter {name} must be an integer >= {minimum}, got {v!r}")
    return int(x)


def _as_list(v) -> list:
    if isinstance(v, str):
        return [s for s in v.replace(";", ",").split(",") if s.strip()]
    return list(v)


def _approx(bits: int | None) -> ApproxField:
    return ApproxField(bits or DEFAULT_PRECISION_BITS)


def one() -> DProfile:
    return DProfile("one", (), EXACT, lambda k: 1)


def tau() -> DProfile:
    return DProfile("tau", (), EXACT, lambda k: k + 1)


def tau_m(m=2) -> DProfile:
    m = _as_int(m, "m", 1)
    return DProfile("tau_m", (("m", m),), EXACT, lambda k: comb(k + m - 1, m - 1))


def tau_k_of_F_r(k=2, r=1) -> DProfile:
    kk = _as_int(k, "k", 1)
    r = _as_int(r, "r", 1)
    return DProfile("tau_k_of_F_r", (("k", kk), ("r", r)), EXACT, lambda j: comb(j * r + kk - 1, kk - 1))


def tau3_of_F2() -> DProfile:
    return DProfile("tau3_of_F2", (), EXACT, lambda j: comb(2 * j + 2, 2))


def inv_tau() -> DProfile:
    return DProfile("inv_tau", (), EXACT, lambda k: Fraction(1, k + 1))


def inv_tau_alpha(alpha=1, precision_bits: int | None = None) -> DProfile:
    a = _as_number(alpha)
    if isinstance(a, Fraction) and a.denominator == 1:
        e = int(a)
        return DProfile("inv_tau_alpha", (("alpha", e),), EXACT, lambda k: Fraction(1, (k + 1) ** e) if e >= 0 else (k + 1) ** -e)
    fld = _approx(precision_bits)
    alpha_f = fld.promote(a)
    return DProfile("inv_tau_alpha", (("alpha", alpha),), fld, lambda k: fld.ctx.power(k + 1, -alpha_f))


def c_omega(c=Fraction(1, 2), precision_bits: int | None = None) -> DProfile:
    cv = _as_number(c)
    if isinstance(cv, Fraction):
        return DProfile("c_omega", (("c", cv),), EXACT, lambda k: cv)
    fld = _approx(precision_bits)
    cf = fld.promote(cv)
    return DProfile("c_omega", (("c", c),), fld, lambda k: cf)


def inv_2_omega() -> DProfile:
    return DProfile("inv_2_omega", (), EXACT, lambda k: Fraction(1, 2))


def ratio_tau(m=2) -> DProfile:
    m = _as_int(m, "m", 1)
    return DProfile("ratio_tau", (("m", m),), EXACT, lambda k: Fraction(comb(k + m - 1, m - 1), comb(k + m, m)))


def inv_tau_Fr(r=1) -> DProfile:
    r = _as_int(r, "r", 1)
    return DProfile("inv_tau_Fr", (("r", r),), EXACT, lambda k: Fraction(1, k * r + 1))


def inv_tau_m(m=3) -> DProfile:
    m = _as_int(m, "m", 1)
    return DProfile("inv_tau_m", (("m", m),), EXACT, lambda k: Fraction(1, comb(k + m - 1, m - 1)))


def g7(m_list=(2, 3), gamma_list=(1, 1), precision_bits: int | None = None) -> DProfile:
    ms = [_as_int(m, "m_list", 1) for m in _as_list(m_list)]
    gs = [_as_number(g) for g in _as_list(gamma_list)]
    if len(ms) != len(gs) or not ms:
        raise UnknownPreset("g7 needs m_list and gamma_list of equal, non-zero length")
    params = (("m_list", tuple(ms)), ("gamma_list", tuple(gs)))
    if all(isinstance(g, Fraction) and g.denominator == 1 for g in gs):
        es = [int(g) for g in gs]

        def rule(k):
            v = Fraction(1)
            for m, e in zip(ms, es):
                v /= Fraction(comb(k + m - 1, m - 1)) ** e
            return v

        return DProfile("g7", params, EXACT, rule)
    fld = _approx(precision_bits)
    gf = [fld.promote(g) for g in gs]

    def approx_rule(k):
        v = fld.one
        for m, g in zip(ms, gf):
            v *= fld.ctx.power(comb(k + m - 1, m - 1), -g)
        return v

    return DProfile("g7", params, fld, approx_rule)


def inv_tau_m_Fr(m=3, r=1) -> DProfile:
    m = _as_int(m, "m", 1)
    r = _as_int(r, "r", 1)
    return DProfile("inv_tau_m_Fr", (("m", m), ("r", r)), EXACT, lambda k: Fraction(1, comb(k * r + m - 1, m - 1)))


def explicit(values: Sequence, precision_bits: int | None = None) -> DProfile:
    """User-supplied ``d_1..d_L``; ``d_k = 0`` for ``k > L``."""
    vals = [_as_number(v) for v in _as_list(values)]
    if all(isinstance(v, Fraction) for v in vals):
        fld: Field = EXACT
    else:
        fld = _approx(precision_bits)
        vals = [fld.promote(v) for v in vals]
    n = len(vals)
    return DProfile("explicit", (("values", tuple(vals)),), fld, lambda k: vals[k - 1] if k <= n else 0)


PRESETS: dict[str, Callable[..., DProfile]] = {
    "one": one,
    "tau": tau,
    "tau_m": tau_m,
    "tau_k_of_F_r": tau_k_of_F_r,
    "tau3_of_F2": tau3_of_F2,
    "inv_tau": inv_tau,
    "inv_tau_alpha": inv_tau_alpha,
    "c_omega": c_omega,
    "inv_2_omega": inv_2_omega,
    "ratio_tau": ratio_tau,
    "inv_tau_Fr": inv_tau_Fr,
    "inv_tau_m": inv_tau_m,
    "g7": g7,
    "inv_tau_m_Fr": inv_tau_m_Fr,
    "explicit": explicit,
}


def make_profile(name: str, **params) -> DProfile:
    """Look up a preset by name; unknown names or parameters raise :class:`UnknownPreset`."""
    try:
        builder = PRESETS[name]
    except KeyError:
        raise UnknownPreset(f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}") from None
    try:
        return builder(**params)
    except TypeError as exc:
        raise UnknownPreset(f"bad parameters for preset {name!r}: {exc}") from None
    except (ValueError, ZeroDivisionError) as exc:
        raise UnknownPreset(f"bad parameters for preset {name!r}: {exc}") from None
