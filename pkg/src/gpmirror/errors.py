"""Exception hierarchy shared by all modules."""


class GPMirrorError(Exception):
    """Base class for every error raised by the package."""


class NotASimplex(GPMirrorError):
    pass


class NotReflexive(GPMirrorError):
    pass


class OriginNotInterior(NotReflexive):
    pass


class PreconditionViolation(GPMirrorError, ValueError):
    pass


class NotStronglyConvex(GPMirrorError):
    pass


class NicenessViolation(GPMirrorError):
    pass


class GradingMismatch(GPMirrorError):
    pass


class ConeViolation(GPMirrorError):
    pass


class NotAUnit(GPMirrorError, ZeroDivisionError):
    pass


class NonzeroConstantTerm(GPMirrorError, ValueError):
    pass


class NegativeArgument(PreconditionViolation):
    pass


class NegativeEntry(PreconditionViolation):
    pass


class NotInK(PreconditionViolation):
    pass


class NotInKnonneg(PreconditionViolation):
    pass


class VerificationFailure(GPMirrorError):
    """A checked identity failed; ``detail`` holds the first offending term."""

    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail


class InfiniteVertexHeight(GPMirrorError, ValueError):
    pass


class MpcpViolation(GPMirrorError):
    pass


class BudgetExceeded(GPMirrorError):
    pass
