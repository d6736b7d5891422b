"""Exception types raised by the engine."""

from __future__ import annotations


class P3Error(Exception):
    """Base class for engine errors."""


class ParseError(P3Error):
    """Malformed input file. Carries the byte offset when known."""

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message if offset is None else f"{message} (byte offset {offset})")
        self.offset = offset


class RosterError(P3Error):
    """Lineup data missing or structurally incomplete."""


class ModelFormatError(P3Error):
    """Model file malformed, truncated, or of an unsupported version."""


class StageError(P3Error):
    """A pipeline stage cannot run, e.g. a required input is missing."""
