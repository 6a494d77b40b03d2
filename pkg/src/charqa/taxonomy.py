"""Question taxonomy: templates, the answer oracle, and per-category generation.

Five categories, numbered 0-4. Recognition carries the single base question;
each attribute category carries two subcategories. Question strings are
frozen templates (version tag TEMPLATE_VERSION) and answers are canonical
strings computed by the oracle, never stored free-form.

Random draw budget (generator method calls per subcategory, in order):

    existence   2   random() branch coin + randrange() character pick
    frequency   1   randrange() character pick
    position    1   randrange() position pick
    relation    2   randrange() x pick + randrange() y pick;
                    degenerate words (one distinct character) instead consume
                    randrange() position pick + random() burned draw and emit
                    a second position question
    length      0
    repetition  0
    start       2   random() branch coin + randrange() character pick
    end         2   random() branch coin + randrange() character pick

The budget is fixed so that a stream's layout never depends on word content,
only on which category was sampled.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum, IntEnum

from .errors import CharacterNotInWord, DegenerateWord, PositionOutOfRange
from .words import Charset, Word, fold_unit

TEMPLATE_VERSION = "en-1"


class Category(IntEnum):
    RECOGNITION = 0
    PRESENCE = 1
    POSITIONAL = 2
    STRUCTURAL = 3
    BOUNDARY = 4


ATTRIBUTE_CATEGORIES = (
    Category.PRESENCE,
    Category.POSITIONAL,
    Category.STRUCTURAL,
    Category.BOUNDARY,
)


class Subcategory(Enum):
    BASE_OCR = "base_ocr"
    EXISTENCE = "existence"
    FREQUENCY = "frequency"
    POSITION = "position"
    RELATION = "relation"
    LENGTH = "length"
    REPETITION = "repetition"
    START = "start"
    END = "end"

    @property
    def category(self) -> Category:
        return _SUBCATEGORY_CATEGORY[self]


_SUBCATEGORY_CATEGORY = {
    Subcategory.BASE_OCR: Category.RECOGNITION,
    Subcategory.EXISTENCE: Category.PRESENCE,
    Subcategory.FREQUENCY: Category.PRESENCE,
    Subcategory.POSITION: Category.POSITIONAL,
    Subcategory.RELATION: Category.POSITIONAL,
    Subcategory.LENGTH: Category.STRUCTURAL,
    Subcategory.REPETITION: Category.STRUCTURAL,
    Subcategory.START: Category.BOUNDARY,
    Subcategory.END: Category.BOUNDARY,
}

CATEGORY_SUBCATEGORIES = {
    Category.RECOGNITION: (Subcategory.BASE_OCR,),
    Category.PRESENCE: (Subcategory.EXISTENCE, Subcategory.FREQUENCY),
    Category.POSITIONAL: (Subcategory.POSITION, Subcategory.RELATION),
    Category.STRUCTURAL: (Subcategory.LENGTH, Subcategory.REPETITION),
    Category.BOUNDARY: (Subcategory.START, Subcategory.END),
}

TEMPLATES = {
    Subcategory.BASE_OCR: "What is this word?",
    Subcategory.EXISTENCE: "Is the character '{c}' in this word?",
    Subcategory.FREQUENCY: "How many times does '{c}' appear?",
    Subcategory.POSITION: "What is the character at position {p}?",
    Subcategory.RELATION: "Does '{x}' come before '{y}' in this word?",
    Subcategory.LENGTH: "What is the total number of characters?",
    Subcategory.REPETITION: "Is there any repeated character?",
    Subcategory.START: "Does this word start with '{c}'?",
    Subcategory.END: "Does this word end with '{c}'?",
}

# Questions are parsed back from stored files, so each parameterized template
# gets a strict regex; DOTALL because a queried unit may itself be exotic.
_PATTERNS = {
    Subcategory.EXISTENCE: re.compile(r"Is the character '(.)' in this word\?\Z", re.DOTALL),
    Subcategory.FREQUENCY: re.compile(r"How many times does '(.)' appear\?\Z", re.DOTALL),
    Subcategory.POSITION: re.compile(r"What is the character at position (\d+)\?\Z"),
    Subcategory.RELATION: re.compile(r"Does '(.)' come before '(.)' in this word\?\Z", re.DOTALL),
    Subcategory.START: re.compile(r"Does this word start with '(.)'\?\Z", re.DOTALL),
    Subcategory.END: re.compile(r"Does this word end with '(.)'\?\Z", re.DOTALL),
}


class AnswerKind(Enum):
    TEXT = "text"
    BINARY = "binary"
    NUMERICAL = "numerical"
    CHARACTER = "character"


_NUMERICAL_RE = re.compile(r"(0|[1-9][0-9]*)\Z")


@dataclass(frozen=True)
class Answer:
    """Canonical answer string tagged with its type."""

    kind: AnswerKind
    value: str

    def __post_init__(self) -> None:
        if self.kind is AnswerKind.BINARY and self.value not in ("Yes", "No"):
            raise ValueError(f"binary answer must be Yes/No, got {self.value!r}")
        if self.kind is AnswerKind.NUMERICAL and not _NUMERICAL_RE.match(self.value):
            raise ValueError(f"numerical answer must be a canonical integer, got {self.value!r}")
        if self.kind is AnswerKind.CHARACTER and len(self.value) != 1:
            raise ValueError(f"character answer must be one unit, got {self.value!r}")


def _binary(flag: bool) -> Answer:
    return Answer(AnswerKind.BINARY, "Yes" if flag else "No")


@dataclass(frozen=True)
class QuestionSpec:
    """A question's taxonomy coordinates plus its parameters.

    Parameter arity per subcategory: base_ocr/length/repetition take none;
    existence/frequency/start/end take `char`; position takes `position`;
    relation takes `char` (x) and `second_char` (y), distinct.
    """

    subcategory: Subcategory
    char: str | None = None
    second_char: str | None = None
    position: int | None = None

    def __post_init__(self) -> None:
        sub = self.subcategory
        want_char = sub in (
            Subcategory.EXISTENCE,
            Subcategory.FREQUENCY,
            Subcategory.START,
            Subcategory.END,
        )
        if want_char:
            self._require(char=True, second_char=False, position=False)
            assert self.char is not None
            if len(self.char) != 1:
                raise ValueError(f"{sub.value} takes a single character, got {self.char!r}")
        elif sub is Subcategory.POSITION:
            self._require(char=False, second_char=False, position=True)
            assert self.position is not None
            if self.position < 1:
                raise ValueError(f"position is 1-based, got {self.position}")
        elif sub is Subcategory.RELATION:
            self._require(char=True, second_char=True, position=False)
            assert self.char is not None and self.second_char is not None
            if len(self.char) != 1 or len(self.second_char) != 1:
                raise ValueError("relation takes two single characters")
            if self.char == self.second_char:
                raise ValueError("relation characters must be distinct")
        else:
            self._require(char=False, second_char=False, position=False)

    def _require(self, char: bool, second_char: bool, position: bool) -> None:
        got = (self.char is not None, self.second_char is not None, self.position is not None)
        if got != (char, second_char, position):
            raise ValueError(f"{self.subcategory.value} has wrong parameter arity")

    @property
    def category(self) -> Category:
        return self.subcategory.category


@dataclass(frozen=True)
class QaPair:
    """A rendered question, its canonical answer, and where it sits in the taxonomy."""

    spec: QuestionSpec
    question: str
    answer: Answer


def render_question(spec: QuestionSpec) -> str:
    """Instantiate the frozen template for a QuestionSpec, bit-exact."""
    sub = spec.subcategory
    template = TEMPLATES[sub]
    if sub is Subcategory.POSITION:
        return template.format(p=spec.position)
    if sub is Subcategory.RELATION:
        return template.format(x=spec.char, y=spec.second_char)
    if spec.char is not None:
        return template.format(c=spec.char)
    return template


def parse_question(sub: Subcategory, question: str) -> QuestionSpec:
    """Recover a QuestionSpec from a stored question string.

    Raises ValueError when the text is not the canonical rendering of `sub`'s
    template (including non-canonical position numbers like "02").
    """
    pattern = _PATTERNS.get(sub)
    if pattern is None:
        if question != TEMPLATES[sub]:
            raise ValueError(f"question does not match the {sub.value} template: {question!r}")
        return QuestionSpec(sub)
    m = pattern.match(question)
    if m is None:
        raise ValueError(f"question does not match the {sub.value} template: {question!r}")
    if sub is Subcategory.POSITION:
        spec = QuestionSpec(sub, position=int(m.group(1)))
    elif sub is Subcategory.RELATION:
        spec = QuestionSpec(sub, char=m.group(1), second_char=m.group(2))
    else:
        spec = QuestionSpec(sub, char=m.group(1))
    if render_question(spec) != question:
        raise ValueError(f"question is not in canonical form: {question!r}")
    return spec


def answer_for_sequence(
    spec: QuestionSpec,
    units: tuple[str, ...],
    text: str,
    case_fold: bool = False,
) -> Answer:
    """Answer `spec` against an arbitrary (possibly empty) unit sequence.

    `text` is the transcription string reported for base-OCR answers. Used
    directly by the QA scorer, where empty predictions are legal and
    out-of-range errors count as wrong answers at the call site.
    """
    sub = spec.subcategory

    def count(c: str) -> int:
        key = fold_unit(c, case_fold)
        return sum(1 for u in units if fold_unit(u, case_fold) == key)

    def first(c: str) -> int | None:
        key = fold_unit(c, case_fold)
        for i, u in enumerate(units, start=1):
            if fold_unit(u, case_fold) == key:
                return i
        return None

    if sub is Subcategory.BASE_OCR:
        return Answer(AnswerKind.TEXT, text)
    if sub is Subcategory.EXISTENCE:
        assert spec.char is not None
        return _binary(count(spec.char) >= 1)
    if sub is Subcategory.FREQUENCY:
        assert spec.char is not None
        return Answer(AnswerKind.NUMERICAL, str(count(spec.char)))
    if sub is Subcategory.POSITION:
        assert spec.position is not None
        if not 1 <= spec.position <= len(units):
            raise PositionOutOfRange(
                f"position {spec.position} outside word of length {len(units)}"
            )
        return Answer(AnswerKind.CHARACTER, units[spec.position - 1])
    if sub is Subcategory.RELATION:
        assert spec.char is not None and spec.second_char is not None
        fx, fy = first(spec.char), first(spec.second_char)
        if fx is None:
            raise CharacterNotInWord(f"{spec.char!r} does not occur in the word")
        if fy is None:
            raise CharacterNotInWord(f"{spec.second_char!r} does not occur in the word")
        return _binary(fx < fy)
    if sub is Subcategory.LENGTH:
        return Answer(AnswerKind.NUMERICAL, str(len(units)))
    if sub is Subcategory.REPETITION:
        folded = [fold_unit(u, case_fold) for u in units]
        return _binary(len(set(folded)) < len(folded))
    if sub is Subcategory.START:
        if not units:
            raise PositionOutOfRange("empty word has no first character")
        assert spec.char is not None
        return _binary(fold_unit(units[0], case_fold) == fold_unit(spec.char, case_fold))
    if sub is Subcategory.END:
        if not units:
            raise PositionOutOfRange("empty word has no last character")
        assert spec.char is not None
        return _binary(fold_unit(units[-1], case_fold) == fold_unit(spec.char, case_fold))
    raise AssertionError(f"unhandled subcategory {sub}")


def oracle_answer(spec: QuestionSpec, w: Word, case_fold: bool = False) -> Answer:
    """Ground-truth answer for `spec` computed from the word alone."""
    return answer_for_sequence(spec, w.units, w.raw, case_fold)


def make_pair(spec: QuestionSpec, w: Word, case_fold: bool = False) -> QaPair:
    return QaPair(spec, render_question(spec), oracle_answer(spec, w, case_fold))


def generate_recognition_pair(w: Word) -> QaPair:
    """The base recognition pair every sample carries."""
    return make_pair(QuestionSpec(Subcategory.BASE_OCR), w)


def _pick(rng, pool: list[str]) -> str:
    if not pool:
        raise DegenerateWord("no candidate characters available")
    return pool[rng.randrange(len(pool))]


def _fold_class_representatives(units: tuple[str, ...], case_fold: bool) -> list[str]:
    """One representative per case-fold class, smallest scalar first."""
    reps: dict[str, str] = {}
    for u in sorted(set(units)):
        reps.setdefault(fold_unit(u, case_fold), u)
    return sorted(reps.values())


def generate_category_pairs(
    w: Word,
    cat: Category,
    charset: Charset,
    rng,
    case_fold: bool = False,
) -> list[QaPair]:
    """Both pairs of attribute category `cat`, parameters drawn from `rng`.

    Draw policy (see module docstring for the exact draw budget):
      existence  coin < 0.5 queries a present character (answer Yes), else an
                 absent charset character (answer No; falls back to a present
                 one when the charset has no absent characters)
      frequency  uniform over the distinct present characters
      position   uniform over 1..len(word)
      relation   uniform ordered pair of distinct present characters; words
                 with a single distinct character get a second position
                 question instead
      start/end  coin < 0.5 queries the true boundary character (Yes), else a
                 uniform different charset character (No; falls back to the
                 true character when no different one exists)
    """
    if cat is Category.RECOGNITION:
        raise ValueError("recognition is generated separately, not sampled")
    if not charset.covers(w, case_fold):
        raise ValueError("charset does not cover the word's characters")

    present = sorted(set(w.units))
    present_keys = {fold_unit(u, case_fold) for u in w.units}
    absent = [m for m in charset.ordered() if fold_unit(m, case_fold) not in present_keys]

    specs: list[QuestionSpec] = []
    if cat is Category.PRESENCE:
        pool = present if rng.random() < 0.5 else (absent or present)
        specs.append(QuestionSpec(Subcategory.EXISTENCE, char=_pick(rng, pool)))
        specs.append(QuestionSpec(Subcategory.FREQUENCY, char=_pick(rng, present)))
    elif cat is Category.POSITIONAL:
        specs.append(QuestionSpec(Subcategory.POSITION, position=1 + rng.randrange(len(w))))
        rel_pool = _fold_class_representatives(w.units, case_fold)
        if len(rel_pool) >= 2:
            i = rng.randrange(len(rel_pool))
            j = rng.randrange(len(rel_pool) - 1)
            if j >= i:
                j += 1
            specs.append(QuestionSpec(Subcategory.RELATION, char=rel_pool[i], second_char=rel_pool[j]))
        else:
            # Degenerate word: keep the two-questions contract with a second
            # position question; burn one draw to hold the budget fixed.
            pos = 1 + rng.randrange(len(w))
            rng.random()
            specs.append(QuestionSpec(Subcategory.POSITION, position=pos))
    elif cat is Category.STRUCTURAL:
        specs.append(QuestionSpec(Subcategory.LENGTH))
        specs.append(QuestionSpec(Subcategory.REPETITION))
    elif cat is Category.BOUNDARY:
        for sub, true_char in ((Subcategory.START, w.units[0]), (Subcategory.END, w.units[-1])):
            if rng.random() < 0.5:
                pool = [true_char]
            else:
                key = fold_unit(true_char, case_fold)
                pool = [m for m in charset.ordered() if fold_unit(m, case_fold) != key] or [true_char]
            specs.append(QuestionSpec(sub, char=_pick(rng, pool)))
    else:
        raise ValueError(f"unknown category {cat}")

    return [make_pair(spec, w, case_fold) for spec in specs]
