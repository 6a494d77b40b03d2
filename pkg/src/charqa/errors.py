"""Exception hierarchy shared across the package.

Every error raised by library code derives from CharQaError so the CLI can
map failures onto its exit-code contract in one place.
"""

from __future__ import annotations


class CharQaError(Exception):
    """Base class for all charqa errors."""


# --- text / question construction -------------------------------------------

class EmptyTranscription(CharQaError):
    """Transcription normalizes to zero character units."""


class PositionOutOfRange(CharQaError):
    """1-based position falls outside the word."""


class CharacterNotInWord(CharQaError):
    """A relation question references a character absent from the word."""


class DegenerateWord(CharQaError):
    """No valid question spec exists for the word (should be unreachable)."""


# --- sampling ----------------------------------------------------------------

class InvalidDistribution(CharQaError):
    """Category probabilities are negative or do not sum to 1."""


class UnknownPreset(CharQaError):
    """Preset name is not one of the known probability presets."""


class BadConfigLine(CharQaError):
    """A config file line cannot be parsed."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"config line {line_no}: {message}")
        self.line_no = line_no


# --- dataset files -----------------------------------------------------------

class IoFailure(CharQaError):
    """Underlying file could not be read or written."""


class MalformedRow(CharQaError):
    """A manifest row does not match the declared format."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class DuplicateId(CharQaError):
    """Sample identifier occurs more than once."""


class EmptyDataset(CharQaError):
    """Operation requires at least one sample."""


class MalformedRecord(CharQaError):
    """An augmented record does not match the output schema."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class UnknownTemplateVersion(CharQaError):
    """Augmented file was produced with a template set this build does not know."""


# --- metrics -----------------------------------------------------------------

class EmptyReferenceSet(CharQaError):
    """Metric requires a non-empty reference set."""


class NoOverlap(CharQaError):
    """No prediction id matches any reference id."""
