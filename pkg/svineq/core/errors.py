"""
Domain exceptions.

Every failure the toolkit raises on purpose derives from ``SvineqError`` so
the CLI can map it to a usage/input exit code in one place.
"""

from __future__ import annotations


class SvineqError(ValueError):
    """Base class for all toolkit errors."""


class NonFiniteEntry(SvineqError):
    """A matrix contains NaN or Inf."""


class NotHermitian(SvineqError):
    """A matrix expected to be Hermitian is not, within tolerance."""


class NegativeArgument(SvineqError):
    """A concave function was evaluated at a negative point."""


class NotPiecewiseLinear(SvineqError):
    """An operation needing a piecewise-linear function got a closed form."""


class InvalidDims(SvineqError):
    """Dimensions outside the admissible range (e.g. m > n)."""


class DimMismatch(SvineqError):
    """Operands of incompatible sizes."""


class NegativeSpectrum(SvineqError):
    """A spectrum that must be non-negative has a negative entry."""


class TFViolation(SvineqError):
    """An assembled index pair fails i_m + j_m <= n + m."""


class FlagConflict(SvineqError):
    """A C/A flag assignment contradicts the forced positions k < c."""


class InvalidP(SvineqError):
    """A Schatten exponent outside (0, 1]."""


class BudgetExceeded(SvineqError):
    """Exhaustive enumeration requested beyond the combinatorial budget."""


class UnsupportedEnsemble(SvineqError):
    """An ensemble kind that cannot serve the requested purpose."""


class InadmissibleFunction(SvineqError):
    """A concave function failing its admissibility check where one is required."""
