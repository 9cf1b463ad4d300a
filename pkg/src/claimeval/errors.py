"""Exception hierarchy shared across the package.

The CLI maps these to process exit codes: data errors exit 1, backend
errors exit 2, configuration errors exit 3.
"""


class ClaimEvalError(Exception):
    """Base class for all errors raised by claimeval."""

    exit_code = 1


class DataError(ClaimEvalError):
    """Invalid, inconsistent, or insufficient input data."""

    exit_code = 1


class ParseError(DataError):
    """A record file could not be parsed; message carries file and line."""


class IntegrityError(DataError):
    """Referential integrity violated: dangling references or duplicate ids."""


class BackendError(ClaimEvalError):
    """A scoring backend failed or could not be initialized."""

    exit_code = 2


class ConfigError(ClaimEvalError):
    """Bad configuration: unknown backend, capability, or threshold."""

    exit_code = 3
