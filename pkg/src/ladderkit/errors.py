"""Exception types raised across ladderkit.

Input problems derive from :class:`InputError`; numerical outcomes where no
answer exists (no passband, no resonance) derive from :class:`NoResult`.
The CLI maps these two families onto exit codes 2 and 3.
"""

from __future__ import annotations


class LadderKitError(Exception):
    """Base class for every error raised by this package."""


class InputError(LadderKitError, ValueError):
    """The caller supplied something invalid."""


class NoResult(LadderKitError):
    """The computation is well posed but has no answer for this data."""


class InvalidElement(InputError):
    pass


class InvalidReference(InputError):
    pass


class InvalidSpec(InputError):
    pass


class InvalidFrequency(InputError):
    pass


class InvalidOrdering(InputError):
    pass


class InvalidOrder(InputError):
    pass


class InsufficientData(InputError):
    pass


class Unsupported(InputError):
    pass


class SingularNetwork(LadderKitError, ArithmeticError):
    """A network denominator vanished.

    ``frequency`` is filled in by callers that know which sweep point failed.
    """

    def __init__(self, message: str, frequency: float | None = None, index: int | None = None):
        if frequency is not None:
            message = f"{message} (at {frequency:.12g} Hz)"
        super().__init__(message)
        self.frequency = frequency
        self.index = index


class NoResonance(NoResult):
    pass


class NoPassband(NoResult):
    pass


class DegenerateTrace(NoResult):
    pass


class BadInitialPoint(NoResult):
    pass


class TouchstoneError(InputError):
    """Base for file-format errors; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ParseError(TouchstoneError):
    pass


class OrderError(TouchstoneError):
    pass


class ArityError(TouchstoneError):
    pass
