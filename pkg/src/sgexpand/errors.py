"""Exception hierarchy; each class maps to one CLI exit code."""


class SGEError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class ParseError(SGEError):
    """Malformed expression or problem file."""

    exit_code = 3

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class ProblemFileError(ParseError):
    pass


class ReductionError(SGEError):
    """PDE is not polynomial in u and its derivatives, or a pipeline step
    does not apply."""

    exit_code = 4


class NotIntegrableError(ReductionError):
    pass


class MethodInapplicable(ReductionError):
    """Homogeneous balance has no positive-integer solution."""


class SolverCapExceeded(SGEError):
    exit_code = 5


class NestedRadicalError(SGEError):
    exit_code = 4


class EvaluationError(SGEError):
    """Numeric evaluation failed (unbound symbol, pole, overflow)."""

    exit_code = 1


class DifferentiationError(SGEError):
    exit_code = 4


class UnresolvedBranchError(SGEError):
    exit_code = 7


class MissingBindingError(SGEError):
    exit_code = 6
