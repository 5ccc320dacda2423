"""Exception types shared across the package."""


class RelayDDEError(Exception):
    """Base class for all package-specific errors."""


class InvalidParameterError(RelayDDEError, ValueError):
    """Bad argument or configuration, rejected before any computation runs."""


class DegenerateMapError(RelayDDEError):
    """Equal gain levels make the return map slope 1: no unique fixed point."""


class RunawayError(RelayDDEError):
    """Event processing exceeded the configured cap (defensive guard)."""


class BracketError(RelayDDEError):
    """Root bracketing failed: no sign change across the given interval."""


class ConvergenceError(RelayDDEError):
    """Iteration budget exhausted before reaching the requested tolerance."""
