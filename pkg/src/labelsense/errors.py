"""Error taxonomy shared across the package.

The CLI maps these onto process exit codes, so new error types should
subclass one of the three roots below rather than Exception directly.
"""


class LabelSenseError(Exception):
    """Base class for all package errors."""


class ParameterError(LabelSenseError):
    """Invalid argument or configuration value (exit code 2)."""


class ScaleError(ParameterError):
    """A brute-force oracle was asked for more work than its budget allows."""


class DegenerateColumnError(ParameterError):
    """A matrix column is identically zero where a nonzero column is required."""

    def __init__(self, column: int, message: str | None = None):
        self.column = column
        super().__init__(message or f"column {column} has zero norm")


class DataError(LabelSenseError):
    """Malformed or unusable data (exit code 3)."""


class ConditioningError(DataError):
    """A linear system is numerically singular; regularization required."""


class AuditError(LabelSenseError):
    """An audit-mode bound check failed (exit code 4)."""


# Exit codes used by the command line entry point.
EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_AUDIT = 4
