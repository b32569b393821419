"""Exception types shared across the package."""


class LctrsError(Exception):
    pass


class InvalidPosition(LctrsError):
    pass


class SortMismatch(LctrsError):
    pass


class NonLinearPattern(LctrsError):
    pass


class NonTheoryTerm(LctrsError):
    pass


class NotValued(LctrsError):
    pass


class SolverUnknown(LctrsError):
    pass


class BackendFailure(LctrsError):
    pass


class UnsatisfiableInput(LctrsError):
    pass


class CapExceeded(LctrsError):
    pass


class GenerationExhausted(LctrsError):
    pass


class ValidationError(LctrsError):
    pass


class ParseError(LctrsError):
    def __init__(self, line, col, expected, found=None):
        self.line = line
        self.col = col
        self.expected = expected
        self.found = found
        msg = f"line {line}, col {col}: expected {expected}"
        if found is not None:
            msg += f", found {found!r}"
        super().__init__(msg)
