"""Exception hierarchy for logopole_core.

Every error carries the exit code the CLI maps it to, so the command line and the
library agree on what a failure means.
"""

from __future__ import annotations

from typing import Any


class LogopoleError(Exception):
    """Base class for every error raised by logopole_core."""

    exit_code = 1

    def __init__(self, message: str, partial: Any = None):
        super().__init__(message)
        self.partial = partial


# --- invalid input (exit 2) -------------------------------------------------------------


class InvalidInput(LogopoleError, ValueError):
    exit_code = 2


class NonPositiveScale(InvalidInput):
    pass


class NegativeRho(InvalidInput):
    pass


class InvalidDegree(InvalidInput):
    pass


class DomainError(InvalidInput):
    pass


class UnsupportedIndex(InvalidInput):
    pass


class RegionViolation(InvalidInput):
    """A route was forced outside the region where it is stable or valid."""


class DivergentRegion(RegionViolation):
    """A series was requested where it does not converge."""


# --- singularities (exit 3) -------------------------------------------------------------


class SingularityError(LogopoleError):
    exit_code = 3


class SingularArgument(SingularityError):
    pass


class OriginSingularity(SingularityError):
    pass


class AxisSingularity(SingularityError):
    pass


class FocalSegmentSingularity(SingularityError):
    pass


class SingularRegion(SingularityError):
    """Point lies inside the exclusion tube around the segment 0 <= z <= R."""


# --- convergence (exit 4) ---------------------------------------------------------------


class ConvergenceError(LogopoleError):
    exit_code = 4


class NonConvergence(ConvergenceError):
    pass


class NoConvergence(NonConvergence):
    """Adaptive quadrature hit its subdivision limit; `partial` holds the QuadResult."""


class SlowConvergence(ConvergenceError):
    pass


class TailTooLarge(ConvergenceError):
    pass


# --- internal / output ------------------------------------------------------------------


class PoleDivision(LogopoleError):
    """Generic degree step attempted at n = m - 1, where it divides by zero."""


class OutputError(LogopoleError):
    exit_code = 5


__all__ = [
    "LogopoleError",
    "InvalidInput",
    "NonPositiveScale",
    "NegativeRho",
    "InvalidDegree",
    "DomainError",
    "UnsupportedIndex",
    "RegionViolation",
    "DivergentRegion",
    "SingularityError",
    "SingularArgument",
    "OriginSingularity",
    "AxisSingularity",
    "FocalSegmentSingularity",
    "SingularRegion",
    "ConvergenceError",
    "NonConvergence",
    "NoConvergence",
    "SlowConvergence",
    "TailTooLarge",
    "PoleDivision",
    "OutputError",
]
