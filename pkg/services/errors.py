"""
Error Types

Every error raised by the services carries a stable code that the
command layer turns into an error report and an exit status.
"""
from typing import Optional


class VolsetError(Exception):
    """Base class for all volset errors."""

    code = 'VOLSET_ERROR'

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class FieldError(VolsetError):
    """Invalid field parameters or elements from different fields."""

    code = 'FIELD_ERROR'


class DimensionError(VolsetError):
    """Operands whose dimensions do not fit together."""

    code = 'DIMENSION_MISMATCH'


class SingularFormError(VolsetError):
    """A bilinear form whose Gram matrix is singular."""

    code = 'SINGULAR_FORM'


class BudgetExceeded(VolsetError):
    """An exhaustive computation larger than the configured budget."""

    code = 'BUDGET_EXCEEDED'

    def __init__(self, what: str, needed: int, budget: int):
        super().__init__(
            f'{what} needs {needed} tuples but the budget is {budget}; '
            f'lower q or d, raise --budget, or choose a faster mode'
        )
        self.needed = needed
        self.budget = budget


class PointSetFormatError(VolsetError):
    """A malformed point-set file."""

    code = 'POINTSET_FORMAT'

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f'line {line}: {message}'
        super().__init__(message)
        self.line = line


class SubspaceMembershipError(VolsetError):
    """A point that was required to lie in a subspace but does not."""

    code = 'NOT_IN_SUBSPACE'
