"""Exception hierarchy. CLI exit codes hang off these classes."""


class FrobtraceError(Exception):
    exit_code = 1


class MalformedInputError(FrobtraceError, ValueError):
    exit_code = 2


class DomainError(FrobtraceError, ValueError):
    exit_code = 2


class SizeGuardError(FrobtraceError):
    """Raised when an enumeration would exceed the element cap."""

    exit_code = 3

    def __init__(self, order: int, cap: int, what: str = "group"):
        super().__init__(f"{what} of order {order} exceeds size guard cap {cap}")
        self.order = order
        self.cap = cap


class InvalidVariantError(DomainError):
    pass


class SingularCurveError(DomainError):
    pass


class BadReductionError(DomainError):
    pass


class ScheduleInfeasibleError(FrobtraceError):
    exit_code = 4

    def __init__(self, message: str, min_feasible_x: float | None = None,
                 y: float | None = None, u: float | None = None):
        super().__init__(message)
        self.min_feasible_x = min_feasible_x
        self.y = y
        self.u = u


class SchemaError(FrobtraceError, ValueError):
    exit_code = 2
