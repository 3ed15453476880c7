"""Exception hierarchy shared by the library and the CLI."""


class UltrapresError(Exception):
    """Base class for all library errors."""


class InputError(UltrapresError, ValueError):
    """Malformed or out-of-domain input.

    ``location`` is whatever pins the problem down: matrix indices,
    a (line, column) pair from a file, or a piece number.
    """

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class PreconditionError(UltrapresError):
    """An operation was called on an input outside its domain."""


class NoWitnessError(UltrapresError):
    """A counterexample was requested where none can exist."""


class UndecidedError(UltrapresError):
    """Certified enclosures could not separate two quantities at the precision cap."""

    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail
