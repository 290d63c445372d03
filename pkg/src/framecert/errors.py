"""Exception types raised across the package."""


class FrameCertError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(FrameCertError, ValueError):
    pass


class DependentInput(FrameCertError, ValueError):
    pass


class ZeroVector(FrameCertError, ValueError):
    pass


class FamilyTooSmall(FrameCertError, ValueError):
    pass


class NotABasis(FrameCertError, ValueError):
    pass


class NotTight(FrameCertError, ValueError):
    pass


class NotADirectSum(FrameCertError, ValueError):
    pass


class FullSpaceMember(FrameCertError, ValueError):
    pass


class PreconditionViolated(FrameCertError, ValueError):
    pass


class InconsistentMeasurements(FrameCertError, ValueError):
    pass


class DependentPerturbation(FrameCertError, ValueError):
    pass


class GenerationFailed(FrameCertError, RuntimeError):
    pass


class UnknownFixture(FrameCertError, KeyError):
    pass
