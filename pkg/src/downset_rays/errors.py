"""Exception types; the CLI maps each to a reserved exit code."""


class InputError(ValueError):
    """Malformed or inconsistent input (exit code 2)."""

    exit_code = 2


class GeometryError(ValueError):
    """A geometric precondition failed, e.g. a non-pointed cone (exit code 3)."""

    exit_code = 3


class GuardError(RuntimeError):
    """A resource guard was exceeded (exit code 4)."""

    exit_code = 4
