"""Manifest ingestion, augmented-file writing/reading, and oracle validation.

Images are never opened; a sample's image path is an opaque string. The
augmented file is line-delimited JSON, UTF-8, LF endings: one header object
on the first line, then one record per sample per pass. Output is
byte-stable for fixed inputs.

Record keys: id, image, text, category (0-4), qa (list of {cat, sub, q, a,
atype}), and subs when a degenerate-word substitution was applied.
Header keys: schema, template_version, rng, seed, probs, charset_hash,
case_fold, passes.
"""

from __future__ import annotations

import hashlib
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .errors import (
    CharacterNotInWord,
    DuplicateId,
    EmptyDataset,
    EmptyTranscription,
    IoFailure,
    MalformedRecord,
    MalformedRow,
    PositionOutOfRange,
    UnknownTemplateVersion,
)
from .sampling import RandomSource, SamplingConfig, sample_category
from .taxonomy import (
    TEMPLATE_VERSION,
    Answer,
    AnswerKind,
    Category,
    QaPair,
    QuestionSpec,
    Subcategory,
    generate_category_pairs,
    generate_recognition_pair,
    oracle_answer,
    parse_question,
)
from .words import Charset, Word, charset_from_string, make_word

logger = logging.getLogger(__name__)

SCHEMA = "charqa.augmented/1"

MANIFEST_FORMATS = ("generic_tsv", "generic_jsonl", "wordart_layout", "esposalles_layout")


@dataclass(frozen=True)
class DatasetSample:
    """One manifest row: stable id, opaque image path, validated transcription."""

    id: str
    image_path: str
    word: Word


@dataclass(frozen=True)
class Substitution:
    """A degenerate-word policy substitution applied to one qa slot."""

    index: int  # 0-based index into the record's qa list
    original: str
    replacement: str


@dataclass(frozen=True)
class AugmentedSample:
    """A sample with its recognition pair plus one sampled category's two pairs."""

    id: str
    image_path: str
    text: str
    charset_hash: str
    qa: tuple[QaPair, ...]
    sampled_category: Category
    substitutions: tuple[Substitution, ...] = ()

    def __post_init__(self) -> None:
        if len(self.qa) != 3 or self.qa[0].spec.subcategory is not Subcategory.BASE_OCR:
            raise ValueError("qa must hold the recognition pair first, then two category pairs")


@dataclass(frozen=True)
class ValidationFailure:
    sample_id: str
    pair_index: int
    expected: str
    stored: str
    line_no: int


@dataclass(frozen=True)
class ValidationReport:
    total: int
    passed: int
    failures: tuple[ValidationFailure, ...]

    @property
    def ok(self) -> bool:
        return not self.failures


# --- manifest parsing ----------------------------------------------------------


def _open_lines(path) -> list[str]:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read().splitlines()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc


def _word_or_raise(text: str, line_no: int) -> Word:
    try:
        return make_word(text)
    except EmptyTranscription:
        raise EmptyTranscription(f"line {line_no}: empty transcription") from None


def _split_annotation_row(line: str, line_no: int) -> tuple[str, str, str | None]:
    """Split one tab-separated row into (image, text, explicit id or None)."""
    cols = line.split("\t")
    if len(cols) == 2:
        return cols[0].strip(), cols[1], None
    if len(cols) == 3:
        return cols[0].strip(), cols[1], cols[2].strip()
    raise MalformedRow(line_no, f"expected 2 or 3 tab-separated columns, got {len(cols)}")


def parse_manifest(path, fmt: str = "generic_tsv") -> list[DatasetSample]:
    """Parse an image-transcription manifest into samples, in file order.

    Formats:
      generic_tsv        image<TAB>text[<TAB>id]; id defaults to the path stem
      generic_jsonl      one {"id","image","text"} object per line
      wordart_layout     annotation lines `path<TAB or SPACE>label`
      esposalles_layout  like generic_tsv, ids prefixed with the manifest file
                         stem so multi-part merges cannot collide
    """
    if fmt not in MANIFEST_FORMATS:
        raise ValueError(f"unknown manifest format {fmt!r}; known: {', '.join(MANIFEST_FORMATS)}")
    lines = _open_lines(path)
    samples: list[DatasetSample] = []
    seen: set[str] = set()
    part_prefix = Path(path).stem

    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        if fmt == "generic_jsonl":
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRow(line_no, f"invalid JSON: {exc}") from None
            if not isinstance(obj, dict) or not {"id", "image", "text"} <= obj.keys():
                raise MalformedRow(line_no, "object must carry id, image and text keys")
            sample_id, image, text = str(obj["id"]), str(obj["image"]), str(obj["text"])
        elif fmt == "wordart_layout":
            if "\t" in line:
                image, _, text = line.partition("\t")
            elif " " in line:
                image, _, text = line.partition(" ")
            else:
                raise MalformedRow(line_no, "expected `path<TAB or SPACE>label`")
            image = image.strip()
            sample_id = Path(image).stem
        else:
            image, text, explicit_id = _split_annotation_row(line, line_no)
            sample_id = explicit_id if explicit_id else Path(image).stem
            if fmt == "esposalles_layout":
                sample_id = f"{part_prefix}/{sample_id}"
        if not image:
            raise MalformedRow(line_no, "empty image path")
        if sample_id in seen:
            raise DuplicateId(f"line {line_no}: duplicate sample id {sample_id!r}")
        seen.add(sample_id)
        samples.append(DatasetSample(sample_id, image, _word_or_raise(text, line_no)))

    if not samples:
        logger.warning("manifest %s contains no samples", path)
    return samples


def merge_manifests(manifest_lists: list[list[DatasetSample]]) -> list[DatasetSample]:
    """Concatenate parsed manifests, rejecting cross-manifest id collisions."""
    merged: list[DatasetSample] = []
    seen: set[str] = set()
    for samples in manifest_lists:
        for sample in samples:
            if sample.id in seen:
                raise DuplicateId(f"duplicate sample id across manifests: {sample.id!r}")
            seen.add(sample.id)
            merged.append(sample)
    return merged


def infer_charset(samples: list[DatasetSample]) -> Charset:
    """Union of every transcription's units, deterministically ordered."""
    if not samples:
        raise EmptyDataset("cannot infer a charset from zero samples")
    members = set()
    for sample in samples:
        members.update(sample.word.units)
    return Charset(frozenset(members), source="inferred-from-dataset")


def charset_digest(ordered_units: tuple[str, ...]) -> str:
    return hashlib.sha256("".join(ordered_units).encode("utf-8")).hexdigest()


# --- augmentation pipeline -----------------------------------------------------


def augment_sample(
    sample: DatasetSample,
    cfg: SamplingConfig,
    charset: Charset,
    pass_index: int,
    charset_hash: str,
) -> AugmentedSample:
    """Generate one sample's record from its own substream."""
    rng = RandomSource.for_sample(cfg.seed, pass_index, sample.id)
    cat = sample_category(cfg, rng)
    pairs = generate_category_pairs(sample.word, cat, charset, rng, case_fold=cfg.case_fold)
    qa = (generate_recognition_pair(sample.word), *pairs)
    substitutions: tuple[Substitution, ...] = ()
    if cat is Category.POSITIONAL and pairs[1].spec.subcategory is Subcategory.POSITION:
        substitutions = (Substitution(index=2, original="relation", replacement="position"),)
    return AugmentedSample(
        id=sample.id,
        image_path=sample.image_path,
        text=sample.word.raw,
        charset_hash=charset_hash,
        qa=qa,
        sampled_category=cat,
        substitutions=substitutions,
    )


def augment_samples(
    samples: list[DatasetSample],
    cfg: SamplingConfig,
) -> tuple[dict, list[AugmentedSample]]:
    """Run generation over a manifest; returns (header, records).

    Records come out pass-major (pass 0 in manifest order, then pass 1, ...).
    Per-sample substreams make the content of each record a function of
    (seed, pass, sample id) only, so thread count and row order never change
    what any sample gets.
    """
    if cfg.template_version != TEMPLATE_VERSION:
        raise UnknownTemplateVersion(
            f"this build renders template set {TEMPLATE_VERSION!r}, not {cfg.template_version!r}"
        )
    if cfg.charset is not None:
        charset = charset_from_string(cfg.charset)
        ordered = charset.ordered()
    elif samples:
        charset = infer_charset(samples)
        ordered = charset.ordered()
    else:
        charset = None
        ordered = ()
    digest = charset_digest(ordered)

    header = {
        "schema": SCHEMA,
        "template_version": cfg.template_version,
        "rng": RandomSource.ALGORITHM,
        "seed": cfg.seed,
        "probs": list(cfg.probs),
        "charset_hash": digest,
        "case_fold": cfg.case_fold,
        "passes": cfg.passes,
    }
    if not samples:
        return header, []
    assert charset is not None

    work = [(sample, pass_index) for pass_index in range(cfg.passes) for sample in samples]

    def run(item: tuple[DatasetSample, int]) -> AugmentedSample:
        sample, pass_index = item
        return augment_sample(sample, cfg, charset, pass_index, digest)

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            augmented = list(pool.map(run, work))
    else:
        augmented = [run(item) for item in work]
    return header, augmented


# --- serialization -------------------------------------------------------------


def _pair_to_obj(pair: QaPair) -> dict:
    return {
        "cat": int(pair.spec.category),
        "sub": pair.spec.subcategory.value,
        "q": pair.question,
        "a": pair.answer.value,
        "atype": pair.answer.kind.value,
    }


def record_to_obj(sample: AugmentedSample) -> dict:
    obj = {
        "id": sample.id,
        "image": sample.image_path,
        "text": sample.text,
        "category": int(sample.sampled_category),
        "qa": [_pair_to_obj(p) for p in sample.qa],
    }
    if sample.substitutions:
        obj["subs"] = [
            {"index": s.index, "from": s.original, "to": s.replacement}
            for s in sample.substitutions
        ]
    return obj


def write_augmented(samples: list[AugmentedSample], header: dict, out_path) -> int:
    """Write header + records as JSON lines; returns the record count."""
    try:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(json.dumps(header, ensure_ascii=False, separators=(",", ":")) + "\n")
            for sample in samples:
                obj = record_to_obj(sample)
                fh.write(json.dumps(obj, ensure_ascii=False, separators=(",", ":")) + "\n")
    except OSError as exc:
        raise IoFailure(f"cannot write {out_path}: {exc}") from exc
    return len(samples)


# --- reading and validation ------------------------------------------------------

_HEADER_KEYS = {"schema", "template_version", "rng", "seed", "probs", "charset_hash", "case_fold", "passes"}
_RECORD_KEYS = {"id", "image", "text", "category", "qa"}
_PAIR_KEYS = {"cat", "sub", "q", "a", "atype"}

_EXPECTED_KIND = {
    Subcategory.BASE_OCR: AnswerKind.TEXT,
    Subcategory.EXISTENCE: AnswerKind.BINARY,
    Subcategory.FREQUENCY: AnswerKind.NUMERICAL,
    Subcategory.POSITION: AnswerKind.CHARACTER,
    Subcategory.RELATION: AnswerKind.BINARY,
    Subcategory.LENGTH: AnswerKind.NUMERICAL,
    Subcategory.REPETITION: AnswerKind.BINARY,
    Subcategory.START: AnswerKind.BINARY,
    Subcategory.END: AnswerKind.BINARY,
}


@dataclass(frozen=True)
class ParsedPair:
    """A structurally valid stored pair whose answer value is kept verbatim."""

    spec: QuestionSpec
    question: str
    stored_answer: str
    kind: AnswerKind


@dataclass(frozen=True)
class ParsedRecord:
    id: str
    image: str
    text: str
    category: Category
    qa: tuple[ParsedPair, ...]
    substitutions: tuple[Substitution, ...]
    line_no: int


def _parse_pair(obj, line_no: int, index: int) -> ParsedPair:
    if not isinstance(obj, dict) or not _PAIR_KEYS <= obj.keys():
        raise MalformedRecord(line_no, f"qa[{index}] must carry keys {sorted(_PAIR_KEYS)}")
    try:
        sub = Subcategory(obj["sub"])
    except ValueError:
        raise MalformedRecord(line_no, f"qa[{index}] has unknown subcategory {obj['sub']!r}") from None
    if obj["cat"] != int(sub.category):
        raise MalformedRecord(line_no, f"qa[{index}] category {obj['cat']!r} does not match {sub.value}")
    try:
        spec = parse_question(sub, obj["q"])
    except ValueError as exc:
        raise MalformedRecord(line_no, f"qa[{index}]: {exc}") from None
    try:
        kind = AnswerKind(obj["atype"])
    except ValueError:
        raise MalformedRecord(line_no, f"qa[{index}] has unknown answer type {obj['atype']!r}") from None
    if kind is not _EXPECTED_KIND[sub]:
        raise MalformedRecord(
            line_no, f"qa[{index}] answer type {kind.value} does not match {sub.value}"
        )
    if not isinstance(obj["a"], str):
        raise MalformedRecord(line_no, f"qa[{index}] answer must be a string")
    return ParsedPair(spec=spec, question=obj["q"], stored_answer=obj["a"], kind=kind)


def _parse_record(line: str, line_no: int) -> ParsedRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedRecord(line_no, f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict) or not _RECORD_KEYS <= obj.keys():
        raise MalformedRecord(line_no, f"record must carry keys {sorted(_RECORD_KEYS)}")
    try:
        category = Category(obj["category"])
    except ValueError:
        raise MalformedRecord(line_no, f"unknown category {obj['category']!r}") from None
    if not isinstance(obj["qa"], list) or len(obj["qa"]) != 3:
        raise MalformedRecord(line_no, "qa must hold exactly 3 pairs")
    qa = tuple(_parse_pair(p, line_no, i) for i, p in enumerate(obj["qa"]))
    if qa[0].spec.subcategory is not Subcategory.BASE_OCR:
        raise MalformedRecord(line_no, "qa[0] must be the base recognition pair")
    for i, pair in enumerate(qa[1:], start=1):
        if pair.spec.category is not category:
            raise MalformedRecord(
                line_no, f"qa[{i}] belongs to category {int(pair.spec.category)}, record says {int(category)}"
            )
    substitutions = []
    for s in obj.get("subs", []):
        if not isinstance(s, dict) or not {"index", "from", "to"} <= s.keys():
            raise MalformedRecord(line_no, "subs entries must carry index, from and to")
        substitutions.append(Substitution(index=int(s["index"]), original=s["from"], replacement=s["to"]))
    return ParsedRecord(
        id=str(obj["id"]),
        image=str(obj["image"]),
        text=str(obj["text"]),
        category=category,
        qa=qa,
        substitutions=tuple(substitutions),
        line_no=line_no,
    )


def load_augmented(path) -> tuple[dict, list[ParsedRecord]]:
    """Structurally parse an augmented file; answer values are not re-derived."""
    lines = _open_lines(path)
    if not lines:
        raise MalformedRecord(1, "file has no header line")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise MalformedRecord(1, f"invalid header JSON: {exc}") from None
    if not isinstance(header, dict) or not _HEADER_KEYS <= header.keys():
        raise MalformedRecord(1, f"header must carry keys {sorted(_HEADER_KEYS)}")
    if header["schema"] != SCHEMA:
        raise MalformedRecord(1, f"unknown schema {header['schema']!r}, expected {SCHEMA!r}")
    if header["template_version"] != TEMPLATE_VERSION:
        raise UnknownTemplateVersion(
            f"file uses template set {header['template_version']!r}; this build knows {TEMPLATE_VERSION!r}"
        )
    records = [
        _parse_record(line, line_no)
        for line_no, line in enumerate(lines[1:], start=2)
        if line.strip()
    ]
    return header, records


def read_augmented(path) -> tuple[dict, list[AugmentedSample]]:
    """Strictly reconstruct AugmentedSamples; rejects non-canonical answers."""
    header, records = load_augmented(path)
    samples = []
    for rec in records:
        pairs = []
        for i, pair in enumerate(rec.qa):
            try:
                answer = Answer(pair.kind, pair.stored_answer)
            except ValueError as exc:
                raise MalformedRecord(rec.line_no, f"qa[{i}]: {exc}") from None
            pairs.append(QaPair(pair.spec, pair.question, answer))
        samples.append(
            AugmentedSample(
                id=rec.id,
                image_path=rec.image,
                text=rec.text,
                charset_hash=header["charset_hash"],
                qa=tuple(pairs),
                sampled_category=rec.category,
                substitutions=rec.substitutions,
            )
        )
    return header, samples


def validate_augmented(path) -> ValidationReport:
    """Recompute every stored answer from the stored transcription."""
    header, records = load_augmented(path)
    case_fold = bool(header["case_fold"])
    failures: list[ValidationFailure] = []
    for rec in records:
        try:
            word = make_word(rec.text)
        except EmptyTranscription:
            raise MalformedRecord(rec.line_no, f"record {rec.id!r} has an empty transcription") from None
        for i, pair in enumerate(rec.qa):
            try:
                expected = oracle_answer(pair.spec, word, case_fold).value
            except (PositionOutOfRange, CharacterNotInWord) as exc:
                # Stored question cannot be answered from the stored text, so
                # the record is inconsistent; report it as a content failure.
                expected = f"<{type(exc).__name__}>"
            if expected != pair.stored_answer:
                failures.append(
                    ValidationFailure(
                        sample_id=rec.id,
                        pair_index=i,
                        expected=expected,
                        stored=pair.stored_answer,
                        line_no=rec.line_no,
                    )
                )
    failed_lines = {f.line_no for f in failures}
    return ValidationReport(
        total=len(records),
        passed=len(records) - len(failed_lines),
        failures=tuple(failures),
    )
