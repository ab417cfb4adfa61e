"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class WedgeError(Exception):
    """Base class for every error raised by :mod:`wedgewh`."""


class DomainError(WedgeError, ValueError):
    """Argument outside the domain of an elementary function."""


class ConfigurationError(WedgeError, ValueError):
    """Physical configuration violates a structural constraint."""


class PoleError(WedgeError, ZeroDivisionError):
    """Evaluation requested exactly at a pole."""


class UsageError(WedgeError, ValueError):
    """Malformed call: wrong shapes, misaligned grids, bad options."""


class ProximityError(WedgeError):
    """Target point lies (numerically) on the integration contour."""


class AccuracyError(WedgeError):
    """Quadrature did not reach its tolerance within the node budget.

    The best available value and its error estimate are attached so callers
    can still report partial results.
    """

    def __init__(self, message: str, best_value=None, error_estimate: float = float("inf")):
        super().__init__(message)
        self.best_value = best_value
        self.error_estimate = error_estimate


class BranchCrossingError(WedgeError):
    """A sampled logarithm jumped by roughly 2*pi along a contour."""


class ProbeError(WedgeError):
    """Decay-rate probe could not evaluate the function along its ray."""
