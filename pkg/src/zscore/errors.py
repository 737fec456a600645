"""Exception types shared across the package.

The command line maps these to exit codes: validation problems (bad
records, unresolvable id joins, malformed trees) exit 1, I/O and
environment failures exit 2.
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(EngineError):
    """Malformed bracketed tree input.

    Carries the byte offset (in the source string) where parsing failed.
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class ValidationError(EngineError):
    """A record or configuration violates a documented contract."""


class InputError(EngineError):
    """An input file could not be read or has the wrong shape."""
