"""Exception hierarchy shared by all domforge modules."""


class DomforgeError(Exception):
    """Base class for all domforge errors."""


class UsageError(DomforgeError):
    """Invalid invocation: bad flags, missing required inputs, bad parameters.

    Mapped to exit code 1 by the CLI.
    """


class DataError(DomforgeError):
    """Invalid or inconsistent data: malformed files, contract violations.

    Mapped to exit code 2 by the CLI.
    """
