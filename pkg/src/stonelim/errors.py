class StoneLimError(Exception):
    """Base class for every error raised by this package."""


class DomainError(StoneLimError, ValueError):
    """A partial operation was applied outside its domain."""


class LatticeError(StoneLimError, ValueError):
    pass


class MeasureError(StoneLimError, ValueError):
    def __init__(self, message, violation=None):
        super().__init__(message)
        self.violation = violation


class FormulaError(StoneLimError, ValueError):
    pass


class FormulaSyntaxError(FormulaError):
    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class ArityError(FormulaError):
    pass


class UnknownSymbolError(FormulaError):
    pass


class StructureError(StoneLimError, ValueError):
    pass


class FilterError(StoneLimError, ValueError):
    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition
