"""Exception types raised across the package."""


class ThermoPurityError(Exception):
    """Base class for all package errors."""


class NonPositiveParameter(ThermoPurityError, ValueError):
    pass


class UnstablePotential(ThermoPurityError, ValueError):
    """The coupled potential is not bounded below (C1*C2 - C3**2/4 <= 0)."""


class NonPositiveBeta(ThermoPurityError, ValueError):
    pass


class NotPositiveDefinite(ThermoPurityError, ValueError):
    pass


class NonIntegrableDirection(ThermoPurityError, ValueError):
    pass


class DegenerateKernel(ThermoPurityError, ValueError):
    pass


class OutOfRange(ThermoPurityError, ValueError):
    pass


class UnderResolvedGrid(ThermoPurityError, ValueError):
    pass


class NonMonotoneBeta(ThermoPurityError, ValueError):
    pass


class InvalidSpec(ThermoPurityError, ValueError):
    pass


class DegenerateAngleWarning(UserWarning):
    """Low-temperature purity evaluated at a mixing angle where tan/cot blow up."""


class IoError(ThermoPurityError, OSError):
    """Writing sweep output failed; carries the path and the underlying cause."""

    def __init__(self, path, cause):
        super().__init__(f"cannot write {path}: {cause}")
        self.path = path
        self.cause = cause
