"""Exception hierarchy shared by all jetphase modules."""


class JetPhaseError(Exception):
    """Base class for all errors raised by this package."""


class InputShapeError(JetPhaseError):
    """Operands disagree on variable count, aux names, or ordering."""


class ConvergenceError(JetPhaseError):
    """A series operation was attempted outside its pronilpotent domain."""


class NotNuRegularError(JetPhaseError):
    """A distribution would carry negative powers of nu."""


class PreconditionError(JetPhaseError):
    """A documented precondition of the operation does not hold."""


class SingularJacobianError(JetPhaseError):
    """A coordinate change has a non-invertible linear part."""


class DegenerateCriticalPointError(JetPhaseError):
    """The Hessian of the leading phase at the origin is singular."""


class NotCriticalError(JetPhaseError):
    """The leading phase does not have a critical point with zero value at 0."""


class NondegeneracyError(JetPhaseError):
    """A required bilinear form is degenerate."""


class SplitOrderingError(JetPhaseError):
    """A factorization split was applied to data in an unusable ordering."""
