"""Exception types and the global numeric tolerance."""

import os

DEFAULT_TOL = 1e-9
TOL_ENV_VAR = "GAUSSCHAN_TOL"


def get_tol(tol=None):
    """Resolve a residual tolerance.

    An explicit ``tol`` wins, then the ``GAUSSCHAN_TOL`` environment variable,
    then :data:`DEFAULT_TOL`.
    """
    if tol is not None:
        return float(tol)
    env = os.environ.get(TOL_ENV_VAR)
    if env:
        return float(env)
    return DEFAULT_TOL


class GaussChanError(ValueError):
    """Base class for all domain errors raised by this package."""


class NotPositive(GaussChanError):
    """A noise matrix has a negative eigenvalue."""


class NotPhysical(GaussChanError):
    """The pair (X, Y) violates y >= |tau - 1| / 2."""


class NotAState(GaussChanError):
    """A covariance matrix violates the uncertainty principle."""


class RankDeficient(GaussChanError):
    """A full-rank matrix was required."""


class DomainError(GaussChanError):
    """An argument lies outside the domain of a formula."""


class BelowThreshold(GaussChanError):
    """The input energy is below the additivity threshold."""


class NotAffine(GaussChanError):
    """A network did not act as an affine covariance-matrix map."""


class ModeIndexOutOfRange(GaussChanError):
    """A gate or ancilla refers to a mode that does not exist."""


class ParseError(ValueError):
    """Malformed user input (matrix literal, channel file or network file)."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
