"""Exception types shared across the package.

Each carries an ``exit_code`` so the CLI can map failures to stable
process exit statuses without a lookup table.
"""


class MotifError(Exception):
    exit_code = 1


class EdgeListParseError(MotifError, ValueError):
    exit_code = 2

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class QueryError(MotifError, ValueError):
    exit_code = 2


class TreewidthError(MotifError):
    """No block could be found in a residual query."""

    exit_code = 3

    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)


class CountOverflowError(MotifError, OverflowError):
    exit_code = 4


class BudgetExceeded(MotifError):
    exit_code = 5

    def __init__(self, message, explored=0):
        self.explored = explored
        super().__init__(message)


class SchemaError(MotifError, ValueError):
    """Incompatible table layouts handed to a join."""


class ContractError(MotifError, ValueError):
    pass


class PlanError(MotifError, ValueError):
    pass


class ChungLuSpecError(MotifError, ValueError):
    pass
