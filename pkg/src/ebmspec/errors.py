"""Exception taxonomy for ebmspec.

Every failure the library can diagnose raises a subclass of
:class:`EbmspecError`, so callers (notably the CLI) can catch one base
class and turn it into a machine-readable report.
"""

from __future__ import annotations


class EbmspecError(Exception):
    """Base class for all ebmspec errors."""


class ModelValidationError(EbmspecError, ValueError):
    """Model parameters violate the admissibility constraints."""


class ConfigError(EbmspecError, ValueError):
    """A model/observation file is malformed or inconsistent."""


class PoleProximityError(EbmspecError, ValueError):
    """Secular-form evaluation was requested too close to a pole.

    Carries the offending pole index and the measured distance.
    """

    def __init__(self, pole_index: int, distance: float, rate: float):
        self.pole_index = pole_index
        self.distance = distance
        self.rate = rate
        super().__init__(
            f"evaluation point within {distance:.3e} of pole -r_{pole_index + 1} "
            f"(rate {rate!r}); secular form is unusable there"
        )


class BracketError(EbmspecError, RuntimeError):
    """A root bracket failed to show the expected sign change."""


class InterlacingError(EbmspecError, RuntimeError):
    """Computed roots do not fit the interlacing structure."""


class DeflationError(EbmspecError, RuntimeError):
    """Deflating the computed real roots left an inconsistent remainder."""


class ResidualError(EbmspecError, RuntimeError):
    """A computed root failed its scaled-residual tolerance."""


class OracleConvergenceError(EbmspecError, RuntimeError):
    """The simultaneous-iteration root oracle did not converge."""


class ConjugateClosureError(EbmspecError, ValueError):
    """A complex root list is not closed under conjugation."""


class RecoveryError(EbmspecError, RuntimeError):
    """Inverse recovery produced inconsistent or inadmissible parameters."""


class FitError(EbmspecError, RuntimeError):
    """Prony fitting could not produce an admissible model."""
