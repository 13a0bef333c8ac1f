"""Exception hierarchy.

Every error raised on purpose by the library derives from
``HurdleGLRMError`` and carries the process exit status the CLI reports
for it: 2 for usage/config problems, 3 for numeric failures.
"""


class HurdleGLRMError(Exception):
    """Base error with a human-readable detail and a CLI exit code."""

    exit_code: int = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class ConfigError(HurdleGLRMError):
    """Invalid configuration, schema, or violated precondition."""

    exit_code = 2


class DomainError(ConfigError, ValueError):
    """A value outside its loss domain, a non-finite score, or a shape mismatch."""


class DegenerateColumnError(HurdleGLRMError, ValueError):
    """A column whose offset diverges or whose scale vanishes."""

    exit_code = 3

    def __init__(self, detail: str, column: str | None = None):
        if column is not None:
            detail = f"column '{column}': {detail}"
        super().__init__(detail)
        self.column = column


class NumericFailure(HurdleGLRMError, ArithmeticError):
    """Non-convergence, divergence, or a failed numeric post-condition."""

    exit_code = 3
