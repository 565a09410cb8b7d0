"""Exception hierarchy shared by every module of the package."""


class FracPeriodicError(Exception):
    """Base class; the CLI serializes any subclass into an error record."""


class GridTooCoarse(FracPeriodicError, ValueError):
    pass


class DomainViolation(FracPeriodicError, ValueError):
    """A singular nonlinearity was evaluated outside (0, inf)."""


class ArgumentOutOfRange(FracPeriodicError, ValueError):
    pass


class QuadratureNonConvergence(FracPeriodicError, RuntimeError):
    pass


class SolvabilityViolation(FracPeriodicError, ValueError):
    """Forcing has a non-zero mean where the operator annihilates constants."""


class ConditionViolation(FracPeriodicError, ValueError):
    """A structural hypothesis on the problem data fails."""


class NonConvergence(FracPeriodicError, RuntimeError):
    def __init__(self, message, last_residual=None):
        super().__init__(message)
        self.last_residual = last_residual


class OrderingViolation(FracPeriodicError, RuntimeError):
    pass


class NoConstantRoot(FracPeriodicError, ValueError):
    pass


class ContinuationStall(FracPeriodicError, RuntimeError):
    def __init__(self, message, last_lambda=None):
        super().__init__(message)
        self.last_lambda = last_lambda


class PositivityLoss(FracPeriodicError, RuntimeError):
    pass


class SeedFailure(FracPeriodicError, ValueError):
    pass


class StallAtFold(FracPeriodicError, RuntimeError):
    def __init__(self, message, last_point=None):
        super().__init__(message)
        self.last_point = last_point


class ParseError(FracPeriodicError, ValueError):
    def __init__(self, message, line=None, column=None):
        loc = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + loc)
        self.line = line
        self.column = column


class ValidationError(FracPeriodicError, ValueError):
    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
