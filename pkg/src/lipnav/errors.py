"""Exception hierarchy for lipnav.

Mathematical outcomes (an inequality failing, no witness existing) are
reports, never exceptions. These classes cover malformed input, violated
operation preconditions and solver breakdown.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from lipnav.core.reports import ValidationReport


class LipnavError(Exception):
    """Base class for all lipnav errors."""


class StructuralError(LipnavError, ValueError):
    """Input has the wrong shape: dimensions, names, indices or bounds."""


class MetricAxiomError(LipnavError, ValueError):
    """A loaded distance matrix is not a metric."""

    def __init__(self, report: ValidationReport) -> None:
        self.report = report
        super().__init__(f"metric axiom violated: {report.summary()}")


class CapExceededError(LipnavError, ValueError):
    """A generator would exceed the configured point cap."""


class NumericBreakdownError(LipnavError, RuntimeError):
    """A solver answer that fails its own certificate, or an unexpected solver status."""


class PreconditionError(LipnavError, ValueError):
    """An operation was called outside its stated preconditions."""


class IntervalEmptyError(PreconditionError):
    """The interval intersection used to place a constant is empty."""


class GeometricPreconditionError(PreconditionError):
    """A ball-separation or radius condition does not hold."""


class WeightError(LipnavError, ValueError):
    """Convex-combination weights are negative, mismatched or do not sum to one."""
