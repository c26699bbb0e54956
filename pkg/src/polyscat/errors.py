"""Exception hierarchy. Every error raised by the package derives from PolyscatError."""


class PolyscatError(Exception):
    pass


# geometry
class NonConvex(PolyscatError, ValueError):
    pass


class DegenerateVertex(PolyscatError, ValueError):
    pass


class EpsTooLarge(PolyscatError, ValueError):
    pass


# media
class InvariantViolated(PolyscatError, ValueError):
    pass


# special functions
class DomainError(PolyscatError, ValueError):
    pass


class OutOfRange(PolyscatError, ValueError):
    pass


# time-domain solvers
class CflViolated(PolyscatError, ValueError):
    pass


class NonFiniteValue(PolyscatError, FloatingPointError):
    pass


class LinearSolveFailure(PolyscatError, RuntimeError):
    pass


# laplace
class NonPositiveS(PolyscatError, ValueError):
    pass


# frequency
class NotContractive(PolyscatError, RuntimeError):
    pass


class NoConvergence(PolyscatError, RuntimeError):
    pass


class PowerIterationStall(PolyscatError, RuntimeError):
    pass


# corners
class RangeNotCertified(PolyscatError, ValueError):
    pass


class GeometryMismatch(PolyscatError, ValueError):
    pass


# harness
class ConfigInvalid(PolyscatError, ValueError):
    pass


class StageFailed(PolyscatError, RuntimeError):
    """A module error raised inside a named harness stage."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage {stage!r}: {type(cause).__name__}: {cause}")
        self.stage = stage
        self.cause = cause
