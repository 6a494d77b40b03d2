"""CER, WER, and QA-consistency scoring of predicted transcriptions.

CER is micro-averaged: corpus-level edit distance over corpus-level
reference length, as a percentage. WER defaults to exact-match error rate
(the datasets are single-word); a whitespace-token edit-distance variant is
available for multi-word references. Missing predictions are scored as
empty strings and reported, never silently skipped.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dataset import DatasetSample, ParsedRecord, load_augmented
from .errors import (
    CharacterNotInWord,
    DuplicateId,
    EmptyReferenceSet,
    IoFailure,
    MalformedRow,
    NoOverlap,
    PositionOutOfRange,
)
from .taxonomy import AnswerKind, Category, answer_for_sequence
from .words import make_word, normalize_text


def levenshtein(a, b) -> int:
    """Minimum edit distance (unit insert/delete/substitute) between sequences."""
    n, m = len(a), len(b)
    if n > m:
        a, b = b, a
        n, m = m, n
    if n == 0:
        return m
    current = list(range(n + 1))
    for i in range(1, m + 1):
        previous, current = current, [i] + [0] * n
        for j in range(1, n + 1):
            add, delete = previous[j] + 1, current[j - 1] + 1
            change = previous[j - 1]
            if a[j - 1] != b[i - 1]:
                change += 1
            current[j] = min(add, delete, change)
    return current[n]


def _units(text: str, case_fold: bool) -> tuple[str, ...]:
    units = tuple(normalize_text(text))
    if case_fold:
        units = tuple(u.casefold() for u in units)
    return units


def cer(preds: dict[str, str], refs: list[DatasetSample], case_fold: bool = False) -> float:
    """Micro-averaged character error rate, in percent; can exceed 100."""
    if not refs:
        raise EmptyReferenceSet("CER needs at least one reference")
    total_distance = 0
    total_length = 0
    for ref in refs:
        ref_units = _units(ref.word.raw, case_fold)
        pred_units = _units(preds.get(ref.id, ""), case_fold)
        total_distance += levenshtein(pred_units, ref_units)
        total_length += len(ref_units)
    return 100.0 * total_distance / total_length


def wer(
    preds: dict[str, str],
    refs: list[DatasetSample],
    case_fold: bool = False,
    token_level: bool = False,
) -> float:
    """Word error rate, in percent.

    Default is exact-match error rate over samples; `token_level` switches to
    whitespace-token edit distance normalized by reference token count.
    """
    if not refs:
        raise EmptyReferenceSet("WER needs at least one reference")
    if token_level:
        total_distance = 0
        total_tokens = 0
        for ref in refs:
            ref_tokens = _fold_tokens(ref.word.raw, case_fold)
            pred_tokens = _fold_tokens(preds.get(ref.id, ""), case_fold)
            total_distance += levenshtein(pred_tokens, ref_tokens)
            total_tokens += len(ref_tokens)
        return 100.0 * total_distance / total_tokens
    wrong = sum(
        1
        for ref in refs
        if _units(preds.get(ref.id, ""), case_fold) != _units(ref.word.raw, case_fold)
    )
    return 100.0 * wrong / len(refs)


def _fold_tokens(text: str, case_fold: bool) -> list[str]:
    tokens = normalize_text(text).split()
    return [t.casefold() for t in tokens] if case_fold else tokens


def answers_equal(kind: AnswerKind, recomputed: str, stored: str, case_fold: bool) -> bool:
    """Compare a recomputed answer with a stored one, canonically.

    Text answers are compared after normalization so that byte-level
    differences (composition, outer whitespace) in raw transcriptions do not
    count as recognition errors.
    """
    if kind is AnswerKind.TEXT:
        a, b = normalize_text(recomputed), normalize_text(stored)
    else:
        a, b = recomputed, stored
    if case_fold and kind in (AnswerKind.TEXT, AnswerKind.CHARACTER):
        a, b = a.casefold(), b.casefold()
    return a == b


@dataclass(frozen=True)
class QaScore:
    per_category: dict[Category, float]
    overall: float
    pairs_total: int
    pairs_correct: int


def score_records(
    records: list[ParsedRecord],
    preds: dict[str, str],
    case_fold: bool = False,
) -> QaScore:
    """Answer every stored question from the predicted transcription.

    A prediction that cannot answer a question (out-of-range position,
    relation over characters it does not contain, boundary question against
    an empty prediction) counts as wrong.
    """
    if not records:
        raise EmptyReferenceSet("QA scoring needs at least one augmented record")
    if not any(rec.id in preds for rec in records):
        raise NoOverlap("no augmented record id occurs in the prediction set")

    totals: dict[Category, int] = {}
    correct: dict[Category, int] = {}
    for rec in records:
        pred_text = preds.get(rec.id, "")
        pred_units = tuple(normalize_text(pred_text))
        for pair in rec.qa:
            cat = pair.spec.category
            totals[cat] = totals.get(cat, 0) + 1
            try:
                recomputed = answer_for_sequence(
                    pair.spec, pred_units, pred_text, case_fold
                ).value
            except (PositionOutOfRange, CharacterNotInWord):
                continue
            if answers_equal(pair.kind, recomputed, pair.stored_answer, case_fold):
                correct[cat] = correct.get(cat, 0) + 1

    per_category = {cat: correct.get(cat, 0) / totals[cat] for cat in sorted(totals)}
    pairs_total = sum(totals.values())
    pairs_correct = sum(correct.values())
    return QaScore(
        per_category=per_category,
        overall=pairs_correct / pairs_total,
        pairs_total=pairs_total,
        pairs_correct=pairs_correct,
    )


def qa_score(aug_path, preds: dict[str, str]) -> dict[Category, float]:
    """Per-category QA accuracy of predictions against an augmented file."""
    header, records = load_augmented(aug_path)
    return score_records(records, preds, case_fold=bool(header["case_fold"])).per_category


@dataclass(frozen=True)
class EvalReport:
    """CER/WER plus QA-consistency accuracies for one prediction set."""

    cer_pct: float
    wer_pct: float
    per_category_qa_accuracy: dict[Category, float]
    overall_qa_accuracy: float
    evaluated: int
    missing: int
    missing_ids: tuple[str, ...]
    case_fold: bool
    wer_mode: str  # "exact" or "token"

    def to_obj(self) -> dict:
        return {
            "cer_pct": self.cer_pct,
            "wer_pct": self.wer_pct,
            "wer_mode": self.wer_mode,
            "qa_accuracy": {
                cat.name.lower(): acc for cat, acc in sorted(self.per_category_qa_accuracy.items())
            },
            "overall_qa_accuracy": self.overall_qa_accuracy,
            "evaluated": self.evaluated,
            "missing": self.missing,
            "missing_ids": list(self.missing_ids),
            "case_fold": self.case_fold,
        }

    def render(self) -> str:
        lines = [
            f"samples evaluated: {self.evaluated} (missing predictions: {self.missing})",
            f"CER: {self.cer_pct:.2f}%",
            f"WER: {self.wer_pct:.2f}% ({self.wer_mode} match, case_fold={str(self.case_fold).lower()})",
            "QA accuracy by category:",
        ]
        for cat, acc in sorted(self.per_category_qa_accuracy.items()):
            lines.append(f"  {cat.name.lower():<12} {acc:.4f}")
        lines.append(f"  {'overall':<12} {self.overall_qa_accuracy:.4f}")
        return "\n".join(lines)


def evaluate(aug_path, preds: dict[str, str], token_level: bool = False) -> EvalReport:
    """Full evaluation of a prediction set against an augmented file."""
    header, records = load_augmented(aug_path)
    case_fold = bool(header["case_fold"])
    refs: list[DatasetSample] = []
    seen: set[str] = set()
    for rec in records:
        if rec.id not in seen:
            seen.add(rec.id)
            refs.append(DatasetSample(rec.id, rec.image, make_word(rec.text)))
    if not refs:
        raise EmptyReferenceSet(f"{aug_path} holds no records")
    qa = score_records(records, preds, case_fold=case_fold)
    missing_ids = tuple(ref.id for ref in refs if ref.id not in preds)
    return EvalReport(
        cer_pct=cer(preds, refs, case_fold),
        wer_pct=wer(preds, refs, case_fold, token_level=token_level),
        per_category_qa_accuracy=qa.per_category,
        overall_qa_accuracy=qa.overall,
        evaluated=len(refs),
        missing=len(missing_ids),
        missing_ids=missing_ids,
        case_fold=case_fold,
        wer_mode="token" if token_level else "exact",
    )


def load_predictions(path) -> dict[str, str]:
    """Read a `<id>\\t<prediction>` file; predictions may be empty strings."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    preds: dict[str, str] = {}
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        if "\t" not in line:
            raise MalformedRow(line_no, "expected `<id>\\t<prediction>`")
        sample_id, _, prediction = line.partition("\t")
        if sample_id in preds:
            raise DuplicateId(f"line {line_no}: duplicate prediction id {sample_id!r}")
        preds[sample_id] = prediction
    return preds
