"""Exception hierarchy shared by all modules."""


class BellWronskianError(Exception):
    """Base class for every error raised by this package."""


class OrderLimitExceeded(BellWronskianError, ValueError):
    pass


class DimensionMismatch(BellWronskianError, ValueError):
    pass


class InsufficientArguments(BellWronskianError, ValueError):
    pass


class InsufficientJetOrder(BellWronskianError, ValueError):
    pass


class BasepointMismatch(BellWronskianError, ValueError):
    pass


class OrderMismatch(BellWronskianError, ValueError):
    pass


class ZeroOrderJet(BellWronskianError, ValueError):
    pass


class NonSquare(BellWronskianError, ValueError):
    pass


class DomainViolation(BellWronskianError, ArithmeticError):
    """Evaluation left the domain of an elementary function (pole, log of a nonpositive value)."""


class ExpressionSyntaxError(BellWronskianError, ValueError):
    def __init__(self, message: str, position: int, source: str = ""):
        self.position = position
        self.source = source
        super().__init__(f"{message} at offset {position}")


class NonIntegerExponent(ExpressionSyntaxError):
    pass


class SmoothnessBudgetExceeded(BellWronskianError, ValueError):
    pass


class DegenerateError(BellWronskianError, ArithmeticError):
    """Numerical degeneracy: the requested quantity is not determined at the sample."""


class VanishingWronskian(DegenerateError):
    pass


class IllConditionedSample(DegenerateError):
    pass


class NoUsablePoints(DegenerateError):
    pass


class ValidationFailure(BellWronskianError):
    """Phi functions matched on the sample but no constant matrix reproduces the frame."""


class ConfigError(BellWronskianError, ValueError):
    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)
