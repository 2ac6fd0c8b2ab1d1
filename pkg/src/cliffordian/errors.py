"""Exception types shared across the package."""

from __future__ import annotations


class CliffordianError(Exception):
    """Base class for every error raised by this package."""


class ZeroNorm(CliffordianError, ArithmeticError):
    """A paravector with (numerically) vanishing norm was inverted."""


class GradeLeak(CliffordianError):
    """A value expected in S+V carries grade-2/3 components above tolerance."""


class EmptyIndex(CliffordianError, ValueError):
    """A multi-index of length zero was given where |alpha| >= 1 is required."""


class BadIndex(CliffordianError, ValueError):
    """A multi-index of the wrong length was given."""


class NotInvertible(CliffordianError, ArithmeticError):
    pass


class AxisSingularity(CliffordianError, ArithmeticError):
    """Lemma-2 lift evaluated on the real axis with a non-vanishing v."""


class PoleOfCotan(CliffordianError, ArithmeticError):
    pass


class RadiusTooLarge(CliffordianError, ValueError):
    """Evaluation radius outside the domain where a series bound holds."""


class NearPole(CliffordianError, ArithmeticError):
    """Evaluation point closer than the configured guard to a lattice point."""

    def __init__(self, message: str, pole=None):
        super().__init__(message)
        self.pole = pole


class Unconverged(CliffordianError):
    """The truncation bound exceeds the target tolerance.

    The truncated value and its bound are attached so callers can still
    inspect them.
    """

    def __init__(self, message: str, result=None):
        super().__init__(message)
        self.result = result


class ConfigError(CliffordianError, ValueError):
    pass
