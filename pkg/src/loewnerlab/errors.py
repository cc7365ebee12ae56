"""Exception hierarchy shared by all modules."""


class LoewnerError(Exception):
    """Base class for every error raised by loewnerlab."""


class DriverDomainError(LoewnerError, ValueError):
    pass


class UnsupportedOrderError(LoewnerError):
    pass


class BreakpointError(LoewnerError):
    pass


class DriverSpecError(LoewnerError, ValueError):
    """Malformed driver specification string; ``column`` is 1-based."""

    def __init__(self, message, text="", column=0):
        self.text = text
        self.column = column
        where = f" (column {column})" if column else ""
        super().__init__(f"{message}{where}")


class NumericalError(LoewnerError):
    """Integrator or quadrature failure."""


class StepCollapseError(NumericalError):
    pass


class SwallowedError(NumericalError):
    """Forward flow reached the singularity g_t(z) = lambda(t)."""


class QuadratureError(NumericalError):
    pass


class InsufficientResolutionError(NumericalError):
    pass


class InvariantViolation(LoewnerError):
    pass


class InsufficientDataError(LoewnerError, ValueError):
    pass


class AccuracyFloorError(LoewnerError):
    pass


class SingularProbeError(NumericalError):
    pass


class TruncationError(LoewnerError, ValueError):
    pass


class ZeroDenominatorError(NumericalError, ZeroDivisionError):
    pass
