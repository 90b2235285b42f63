"""Exception hierarchy shared by all matrixball modules.

Exit-code mapping used by the CLI: usage/precondition problems map to 2,
numerical degeneracies to 3, failed invariants and non-convergence to 1.
"""


class MatrixBallError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class DomainError(MatrixBallError):
    """Invalid domain parameters, e.g. the tube case b = 0."""

    exit_code = 2


class AdmissibilityError(MatrixBallError):
    """Spectral parameter outside the admissible half-plane Re(s) > (a/2)(r-1)."""

    exit_code = 2


class MembershipError(MatrixBallError):
    """Matrix fails the defining invariant of G, the domain, or the Shilov boundary."""

    exit_code = 2


class DegeneracyError(MatrixBallError):
    """Numerical degeneracy: near-singular CZ+D, boundary contact, condition blowup."""

    exit_code = 3


class ConvergenceError(MatrixBallError):
    """A limit or extrapolation failed to converge (or diverged, as for inadmissible s)."""

    exit_code = 1
