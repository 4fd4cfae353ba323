"""Exception types shared across the package.

ValidationError means the caller handed us something outside an
operation's contract; BudgetError means a configured effort cap was hit.
The CLI maps these to exit codes 2 and 1 respectively.
"""

__all__ = ["QuatPathError", "ValidationError", "BudgetError"]


class QuatPathError(Exception):
    pass


class ValidationError(QuatPathError):
    pass


class BudgetError(QuatPathError):
    pass
