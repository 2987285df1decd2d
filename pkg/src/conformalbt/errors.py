"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command line front end.
Codes 10-19 are input validation failures, 20-39 are numerical failures
and 40 is file IO.
"""


class ConformalBTError(Exception):
    exit_code = 1


class ValidationError(ConformalBTError, ValueError):
    exit_code = 10


class DimensionMismatch(ValidationError):
    exit_code = 11


class InvalidMap(ValidationError):
    exit_code = 12


class MethodNotApplicable(ValidationError):
    """Lyapunov route requested for a map that is not a Möbius transformation."""

    exit_code = 13


class NonHermitianRHS(ValidationError):
    exit_code = 14


class NumericalError(ConformalBTError, ArithmeticError):
    exit_code = 20


class SpectrumCollision(NumericalError):
    """``F`` and ``-F^*`` share an eigenvalue, so the Lyapunov solution is not unique."""

    exit_code = 21


class IndefiniteMatrix(NumericalError):
    exit_code = 22


class PoleEvaluation(NumericalError):
    exit_code = 23


class SingularShift(NumericalError):
    exit_code = 24


class ResolventSingular(NumericalError):
    exit_code = 25


class UnstableMappedSpectrum(NumericalError):
    exit_code = 26


class QuadratureDivergence(NumericalError):
    exit_code = 27


class SingularValueTie(NumericalError):
    exit_code = 28


class RankDeficient(NumericalError):
    exit_code = 29


class StepSizeUnderflow(NumericalError):
    exit_code = 30


class EmptyTrajectory(NumericalError):
    exit_code = 31


class IoError(ConformalBTError, OSError):
    exit_code = 40
