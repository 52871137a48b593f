"""Exception hierarchy.

Errors split into two families that the CLI maps onto exit codes:
``InputError`` (bad configuration or out-of-domain arguments, exit 1) and
``NumericalError`` (a valid input that the numerics could not handle, exit 2).
"""


class TunnellingError(Exception):
    """Base class for every error raised by this package."""


class InputError(TunnellingError, ValueError):
    pass


class NumericalError(TunnellingError, ArithmeticError):
    pass


class DomainError(InputError):
    pass


class NotEvanescent(InputError):
    """Raised when the energy is not below the barrier (propagating regime)."""


class InvalidMeasurement(InputError):
    pass


class InvalidDispersion(InputError):
    pass


class UnsupportedBarrier(InputError):
    pass


class NoPerturbation(InputError):
    pass


class ParseError(InputError):
    def __init__(self, message, line=None, key=None):
        self.line = line
        self.key = key
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)


class ValidationError(InputError):
    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class SingularOverlap(NumericalError):
    pass


class ConvergenceFailure(NumericalError):
    def __init__(self, message, partial=None):
        self.partial = partial
        super().__init__(message)


class NumericalBlowup(NumericalError):
    def __init__(self, step):
        self.step = step
        super().__init__(f"non-finite wavefunction at step {step}")


class GridTooSmall(InputError):
    pass


class PrematureMeasurement(NumericalError):
    pass
