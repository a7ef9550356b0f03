"""
Exception hierarchy for qheat.

Every numerical failure raised by the library derives from QHeatError so
the CLI can map it onto a single exit code; configuration problems derive
from ConfigError.
"""

from typing import Optional


class QHeatError(RuntimeError):
    """Base class for all qheat failures."""


class ConfigError(QHeatError, ValueError):
    """Malformed or inconsistent parameter / sweep configuration."""


class PreconditionViolated(QHeatError):
    """An operation was called outside its domain of validity."""


class NoConvergence(QHeatError):
    """Root bracketing or iteration failed."""


class SingularOperatingPoint(QHeatError):
    """The flux bias drives an effective inductance through zero."""


class PoleEncountered(QHeatError):
    """A spectral denominator vanished on the evaluation grid."""

    def __init__(self, message: str, omega: Optional[float] = None):
        super().__init__(message)
        self.omega = omega


class IllConditioned(QHeatError):
    """Banded elimination lost accuracy beyond recovery."""


class NoTailDecay(QHeatError):
    """Sideband coefficients do not decay within the truncation order."""


class QuadratureNotConverged(QHeatError):
    """Doubling the grid density changed an integral beyond tolerance."""


class StiffnessDetected(QHeatError):
    """A time integrator could not make progress."""


class DivisionDegenerate(QHeatError):
    """A ratio was requested with a vanishing denominator."""


class HarmonicTruncation(QHeatError):
    """A harmonic series did not decay within its cutoff."""
