"""Exception hierarchy shared by all tsip modules."""


class TSIPError(Exception):
    """Base class for every error raised by tsip."""


class InvalidInputError(TSIPError, ValueError):
    pass


class DivisionError(TSIPError, ZeroDivisionError):
    pass


class PoleError(TSIPError, ValueError):
    """Numeric evaluation too close to a denominator root."""

    def __init__(self, distance, root=None):
        self.distance = distance
        self.root = root
        super().__init__(f"evaluation point within {distance:.3e} of a pole at {root}")


class UnknownRootError(TSIPError, ValueError):
    def __init__(self, factor):
        self.factor = factor
        super().__init__(f"denominator factor {factor} has roots outside the supplied set")


class ConstraintViolation(TSIPError, ValueError):
    pass


class UnknownFamilyError(TSIPError, KeyError):
    pass


class IndexBeyondBoundError(TSIPError, IndexError):
    def __init__(self, n, max_index):
        self.n = n
        self.max_index = max_index
        count = max_index + 1
        super().__init__(f"level {n} requested but the instance has only {count} bound state(s)")


class NegativeDiscriminantError(TSIPError, ValueError):
    pass


class ZeroDenominatorFunctionError(TSIPError, ZeroDivisionError):
    pass


class ConsistencyError(TSIPError, AssertionError):
    """Two independent routes to the same exact quantity disagree."""


class DecompositionResidualError(TSIPError, ArithmeticError):
    pass


class DomainError(TSIPError, ValueError):
    pass


class NonIntegrableError(TSIPError, ArithmeticError):
    pass


class InstanceMismatchError(TSIPError, ValueError):
    pass


class BracketingError(TSIPError, RuntimeError):
    def __init__(self, level, detail):
        self.level = level
        super().__init__(f"level {level}: {detail}")


class NonConstantDifferenceError(TSIPError, ArithmeticError):
    def __init__(self, difference):
        self.difference = difference
        super().__init__(f"partner potentials differ by a non-constant function: {difference}")


class NoClassError(TSIPError, ArithmeticError):
    pass
