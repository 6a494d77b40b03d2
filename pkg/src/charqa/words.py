"""Validated transcriptions and the character-level primitives built on them.

A character unit is one Unicode scalar value after canonical composition
(NFC) normalization. Grapheme clusters are deliberately not used: the target
charsets are single-scalar alphabets. Indexing is 1-based throughout, because
the question taxonomy counts positions from 1.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field

from .errors import EmptyDataset, EmptyTranscription, PositionOutOfRange


def normalize_text(raw: str) -> str:
    """NFC-compose `raw` and strip surrounding whitespace.

    This is the single normalization applied everywhere a transcription or a
    prediction enters the pipeline; whitespace-only input normalizes to "".
    """
    return unicodedata.normalize("NFC", raw).strip()


def fold_unit(unit: str, case_fold: bool) -> str:
    """Comparison key for one unit; identity unless case folding is on."""
    return unit.casefold() if case_fold else unit


@dataclass(frozen=True)
class Word:
    """A non-empty, normalized transcription with 1-based character access."""

    raw: str
    units: tuple[str, ...] = field(init=False)

    def __post_init__(self) -> None:
        normalized = normalize_text(self.raw)
        if not normalized:
            raise EmptyTranscription(f"transcription {self.raw!r} has no character units")
        object.__setattr__(self, "units", tuple(normalized))

    def __len__(self) -> int:
        return len(self.units)

    def render(self) -> str:
        """The normalized string the units spell."""
        return "".join(self.units)


def make_word(raw: str) -> Word:
    """Build a validated Word; raises EmptyTranscription on empty/whitespace input."""
    return Word(raw)


def char_at(w: Word, pos: int) -> str:
    """Unit at 1-based position `pos`."""
    if not 1 <= pos <= len(w.units):
        raise PositionOutOfRange(f"position {pos} outside word of length {len(w.units)}")
    return w.units[pos - 1]


def frequency(w: Word, c: str, case_fold: bool = False) -> int:
    """Occurrence count of unit `c` in the word."""
    key = fold_unit(c, case_fold)
    return sum(1 for u in w.units if fold_unit(u, case_fold) == key)


def first_index(w: Word, c: str, case_fold: bool = False) -> int | None:
    """1-based index of the first occurrence of `c`, or None if absent."""
    key = fold_unit(c, case_fold)
    for i, u in enumerate(w.units, start=1):
        if fold_unit(u, case_fold) == key:
            return i
    return None


def has_repeat(w: Word, case_fold: bool = False) -> bool:
    """True iff some unit occurs at least twice."""
    folded = [fold_unit(u, case_fold) for u in w.units]
    return len(set(folded)) < len(folded)


@dataclass(frozen=True)
class Charset:
    """Deduplicated character units with a deterministic iteration order."""

    members: frozenset[str]
    source: str = "explicit-config"  # or "inferred-from-dataset"

    def __post_init__(self) -> None:
        if not self.members:
            raise EmptyDataset("charset must be non-empty")
        for m in self.members:
            if len(m) != 1:
                raise ValueError(f"charset member {m!r} is not a single unit")

    def ordered(self) -> tuple[str, ...]:
        """Members sorted by scalar value; the order every random draw uses."""
        return tuple(sorted(self.members))

    def __iter__(self):
        return iter(self.ordered())

    def __contains__(self, unit: str) -> bool:
        return unit in self.members

    def covers(self, w: Word, case_fold: bool = False) -> bool:
        """Whether every unit of `w` is in the charset (mod case folding)."""
        keys = {fold_unit(m, case_fold) for m in self.members}
        return all(fold_unit(u, case_fold) in keys for u in w.units)


def charset_from_string(chars: str, source: str = "explicit-config") -> Charset:
    """Charset from the distinct units of a plain string (NFC-composed)."""
    normalized = unicodedata.normalize("NFC", chars)
    return Charset(frozenset(normalized), source=source)
