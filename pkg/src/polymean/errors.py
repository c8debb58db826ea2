"""Exception types raised across polymean."""

from __future__ import annotations


class PolymeanError(Exception):
    """Base class for all library errors."""


class NonUnitConstantTerm(PolymeanError, ValueError):
    """Logarithm requested of a series whose constant term is not 1."""


class NonZeroConstantTerm(PolymeanError, ValueError):
    """Exponential requested of a series whose constant term is not 0."""


class FieldMismatch(PolymeanError, TypeError):
    """Exact and approximate operands were combined without explicit promotion."""


class NonIntegerResult(PolymeanError, ArithmeticError):
    """An integrality that must hold by construction failed."""


class FloatProfileNotSupported(PolymeanError):
    """An exact polynomial-in-q result was requested for a float-valued profile."""


class MismatchDetected(PolymeanError):
    """Two independent computations of the same quantity disagreed."""

    def __init__(self, q, N, first, second, label=""):
        self.q = q
        self.N = N
        self.first = first
        self.second = second
        self.label = label
        super().__init__(f"{label} mismatch at q={q}, N={N}: {first} != {second}")


class D1OutOfRange(PolymeanError, ValueError):
    """The profile's d_1 is outside the open interval (0, 1)."""


class CondaViolated(UserWarning):
    """k|a_k| <= 1 fails; expansions are evaluated but flagged non-rigorous."""


class UnknownPreset(PolymeanError, ValueError):
    """Preset name or parameters are not recognised."""


class NonPrimeModulus(PolymeanError, ValueError):
    """The brute-force oracle only works over prime fields."""


class TableTooShallow(PolymeanError, ValueError):
    """The irreducible table does not reach the degrees a factorization needs."""


class BudgetExceeded(PolymeanError):
    """An enumeration would exceed the configured work budget."""
