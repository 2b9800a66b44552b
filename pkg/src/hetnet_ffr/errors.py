"""Exception hierarchy shared by the analytic and simulation paths."""


class HetnetFFRError(Exception):
    """Base class for all package errors."""


class ConfigError(HetnetFFRError, ValueError):
    """Scenario or argument outside its valid domain.

    ``code`` is a short machine-readable tag (e.g. ``"alpha_le_2"``).
    """

    def __init__(self, message, code="invalid"):
        super().__init__(message)
        self.code = code


class EvaluationError(HetnetFFRError, ArithmeticError):
    """An integrand produced a non-finite value."""


class DegenerateConditioning(HetnetFFRError):
    """The edge-user conditioning event has (numerically) zero probability."""


class UnsupportedRegime(HetnetFFRError):
    """A closed-form fast path was requested outside alpha=4, noise=0."""


class InsufficientConditioning(HetnetFFRError):
    """Monte Carlo collected too few conditioned drops."""


class GridMismatch(HetnetFFRError, ValueError):
    """Two curves were compared on different threshold grids."""
