"""Exception taxonomy shared across the package.

Exit codes are part of the CLI contract: config/usage problems exit 2,
numerical failures exit 3, storage problems exit 4.
"""


class ShireError(Exception):
    exit_code = 1


class ConfigError(ShireError):
    """Bad configuration: mismatched shapes, unknown names, invalid values."""

    exit_code = 2


class UsageError(ShireError):
    """API misuse: stepping a finished episode, out-of-range arguments."""

    exit_code = 2


class NumericalError(ShireError):
    """NaN/Inf encountered where finite values are required."""

    exit_code = 3


class StorageError(ShireError):
    """Corrupt, truncated, or otherwise unreadable artifact files."""

    exit_code = 4
