"""charqa: character-level QA supervision for OCR datasets, plus evaluation.

Turns image-transcription manifests into question-answer records (one base
recognition question plus both questions of one probabilistically sampled
attribute category per sample) and scores predicted transcriptions with
CER, WER, and QA-consistency accuracy.
"""

from .dataset import (
    AugmentedSample,
    DatasetSample,
    ValidationReport,
    augment_samples,
    infer_charset,
    load_augmented,
    merge_manifests,
    parse_manifest,
    read_augmented,
    validate_augmented,
    write_augmented,
)
from .errors import CharQaError
from .metrics import EvalReport, cer, evaluate, levenshtein, load_predictions, qa_score, wer
from .sampling import PRESETS, RandomSource, SamplingConfig, preset, sample_category
from .taxonomy import (
    TEMPLATE_VERSION,
    TEMPLATES,
    Answer,
    AnswerKind,
    Category,
    QaPair,
    QuestionSpec,
    Subcategory,
    generate_category_pairs,
    generate_recognition_pair,
    oracle_answer,
    render_question,
)
from .words import Charset, Word, char_at, first_index, frequency, has_repeat, make_word

__version__ = "0.1.0"

__all__ = [
    "Answer",
    "AnswerKind",
    "AugmentedSample",
    "Category",
    "CharQaError",
    "Charset",
    "DatasetSample",
    "EvalReport",
    "PRESETS",
    "QaPair",
    "QuestionSpec",
    "RandomSource",
    "SamplingConfig",
    "Subcategory",
    "TEMPLATES",
    "TEMPLATE_VERSION",
    "ValidationReport",
    "Word",
    "augment_samples",
    "cer",
    "char_at",
    "evaluate",
    "first_index",
    "frequency",
    "generate_category_pairs",
    "generate_recognition_pair",
    "has_repeat",
    "infer_charset",
    "levenshtein",
    "load_augmented",
    "load_predictions",
    "make_word",
    "merge_manifests",
    "oracle_answer",
    "parse_manifest",
    "preset",
    "qa_score",
    "read_augmented",
    "render_question",
    "sample_category",
    "validate_augmented",
    "wer",
    "write_augmented",
]
