from __future__ import annotations

import functools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from charqa.dataset import augment_samples, load_augmented, parse_manifest, write_augmented
from charqa.errors import DuplicateId, EmptyReferenceSet, MalformedRow, NoOverlap
from charqa.metrics import (
    cer,
    evaluate,
    levenshtein,
    load_predictions,
    qa_score,
    score_records,
    wer,
)
from charqa.sampling import SamplingConfig
from charqa.taxonomy import Category
from charqa.words import make_word

from conftest import write_tsv


@functools.lru_cache(maxsize=None)
def edit_distance_ref(a: str, b: str) -> int:
    """Textbook recursion, memoized; the independent check for levenshtein."""
    if not a:
        return len(b)
    if not b:
        return len(a)
    cost = 0 if a[0] == b[0] else 1
    return min(
        edit_distance_ref(a[1:], b) + 1,
        edit_distance_ref(a, b[1:]) + 1,
        edit_distance_ref(a[1:], b[1:]) + cost,
    )


def make_refs(tmp_path, rows):
    return parse_manifest(write_tsv(tmp_path / "m.tsv", rows))


class TestLevenshtein:
    @pytest.mark.parametrize(
        "a,b,d",
        [
            ("kitten", "sitting", 3),
            ("", "", 0),
            ("abc", "abc", 0),
            ("", "abc", 3),
            ("abc", "", 3),
            ("flaw", "lawn", 2),
            ("gumbo", "gambol", 2),
            ("HELO", "HELLO", 1),
        ],
    )
    def test_known_distances(self, a, b, d):
        assert levenshtein(a, b) == d

    @given(st.text(max_size=8), st.text(max_size=8))
    @settings(max_examples=300, deadline=None)
    def test_matches_reference(self, a, b):
        assert levenshtein(a, b) == edit_distance_ref(a, b)

    @given(st.text(max_size=8), st.text(max_size=8), st.text(max_size=8))
    @settings(max_examples=200, deadline=None)
    def test_metric_axioms(self, a, b, c):
        assert levenshtein(a, b) == levenshtein(b, a)
        assert (levenshtein(a, b) == 0) == (a == b)
        assert levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c)


class TestCer:
    def test_single_deletion(self, tmp_path):
        refs = make_refs(tmp_path, [("1.png", "HELLO")])
        assert cer({"1": "HELO"}, refs) == 20.0

    def test_all_exact(self, tmp_path):
        refs = make_refs(tmp_path, [("1.png", "HELLO"), ("2.png", "WORLD")])
        assert cer({"1": "HELLO", "2": "WORLD"}, refs) == 0.0

    def test_missing_prediction_counts_full_length(self, tmp_path):
        refs = make_refs(tmp_path, [("1.png", "HELLO"), ("2.png", "WORLD")])
        # missing "2" behaves like predicting "": distance 5 over total 10
        assert cer({"1": "HELLO"}, refs) == 50.0

    def test_can_exceed_hundred(self, tmp_path):
        refs = make_refs(tmp_path, [("1.png", "A")])
        assert cer({"1": "XYZ"}, refs) == 300.0

    def test_empty_refs(self):
        with pytest.raises(EmptyReferenceSet):
            cer({}, [])

    def test_case_fold(self, tmp_path):
        refs = make_refs(tmp_path, [("1.png", "Hello")])
        assert cer({"1": "hello"}, refs) == 20.0
        assert cer({"1": "hello"}, refs, case_fold=True) == 0.0


class TestWer:
    def test_one_of_three_wrong(self, tmp_path):
        refs = make_refs(tmp_path, [("1.png", "aa"), ("2.png", "bb"), ("3.png", "cc")])
        got = wer({"1": "aa", "2": "bb", "3": "xx"}, refs)
        assert got == pytest.approx(33.33, abs=0.01)

    def test_all_exact(self, tmp_path):
        refs = make_refs(tmp_path, [("1.png", "aa")])
        assert wer({"1": "aa"}, refs) == 0.0

    def test_all_wrong(self, tmp_path):
        refs = make_refs(tmp_path, [("1.png", "aa"), ("2.png", "bb")])
        assert wer({"1": "x", "2": "y"}, refs) == 100.0

    def test_five_sample_fixture(self, tmp_path):
        rows = [(f"{i}.png", w) for i, w in enumerate(["ab", "cd", "ef", "gh", "ij"])]
        refs = make_refs(tmp_path, rows)
        preds = {"0": "ab", "1": "cd", "2": "ef", "3": "gh", "4": "XX"}
        assert wer(preds, refs) == 20.0

    def test_token_level(self, tmp_path):
        refs = make_refs(tmp_path, [("1.png", "the quick fox")])
        # one substituted token out of three
        assert wer({"1": "the quick dog"}, refs, token_level=True) == pytest.approx(100 / 3)

    def test_token_level_bounded(self, tmp_path):
        refs = make_refs(tmp_path, [("1.png", "a b")])
        exact = wer({"1": "c d e"}, refs)
        token = wer({"1": "c d e"}, refs, token_level=True)
        assert exact == 100.0
        assert token == 150.0  # token WER is a ratio, not capped at 100


def build_aug(tmp_path, rows, seed=5, case_fold=False):
    samples = parse_manifest(write_tsv(tmp_path / "m.tsv", rows))
    header, records = augment_samples(samples, SamplingConfig(seed=seed, case_fold=case_fold))
    out = tmp_path / "aug.jsonl"
    write_augmented(records, header, out)
    return out, {s.id: s.word.raw for s in samples}


class TestQaScore:
    def test_ground_truth_scores_perfect(self, tmp_path):
        out, truth = build_aug(tmp_path, [(f"{i}.png", w) for i, w in enumerate(["HELLO", "World", "ab", "zzz", "Q"])])
        accuracy = qa_score(out, truth)
        for cat, value in accuracy.items():
            assert value == 1.0

    def test_partial_prediction(self, tmp_path):
        # Force the presence category so the stored pairs are predictable.
        samples = parse_manifest(write_tsv(tmp_path / "m.tsv", [("1.png", "HELLO")]))
        header, records = augment_samples(samples, SamplingConfig(seed=3, probs=(1.0, 0.0, 0.0, 0.0)))
        out = tmp_path / "aug.jsonl"
        write_augmented(records, header, out)

        accuracy = qa_score(out, {"1": "HELO"})
        assert accuracy[Category.RECOGNITION] == 0.0  # HELO != HELLO

    def test_empty_prediction_conventions(self, tmp_path):
        samples = parse_manifest(write_tsv(tmp_path / "m.tsv", [("1.png", "HELLO")]))
        header, records = augment_samples(samples, SamplingConfig(seed=3, probs=(0.0, 0.0, 0.0, 1.0)))
        out = tmp_path / "aug.jsonl"
        write_augmented(records, header, out)
        _, stored_records = load_augmented(out)

        score = score_records(stored_records, {"1": ""})
        # boundary questions are unanswerable from an empty prediction, and
        # the recognition answer can never match
        assert score.per_category[Category.RECOGNITION] == 0.0
        assert score.per_category[Category.BOUNDARY] == 0.0

    def test_empty_prediction_existence_no_still_right(self, tmp_path):
        # An empty prediction contains nothing, so a stored "No" existence
        # answer recomputes to "No" and counts as correct.
        samples = parse_manifest(write_tsv(tmp_path / "m.tsv", [("1.png", "HELLO")]))
        for seed in range(60):
            cfg = SamplingConfig(seed=seed, probs=(1.0, 0.0, 0.0, 0.0), charset="ABCDEFGHIJKLMNOP")
            header, records = augment_samples(samples, cfg)
            if records[0].qa[1].answer.value == "No":
                break
        else:
            pytest.fail("no seed produced an absent-character existence question")
        out = tmp_path / "aug.jsonl"
        write_augmented(records, header, out)
        _, stored_records = load_augmented(out)
        score = score_records(stored_records, {"1": ""})
        # existence right, frequency (a present character, count >= 1) wrong
        assert score.per_category[Category.PRESENCE] == 0.5

    def test_no_overlap(self, tmp_path):
        out, _ = build_aug(tmp_path, [("1.png", "HELLO")])
        with pytest.raises(NoOverlap):
            qa_score(out, {"other": "HELLO"})

    def test_missing_ids_scored_as_empty(self, tmp_path):
        out, truth = build_aug(tmp_path, [("1.png", "HELLO"), ("2.png", "HELLO")])
        full = evaluate(out, truth)
        half = evaluate(out, {"1": truth["1"]})
        assert full.missing == 0
        assert half.missing == 1
        assert half.missing_ids == ("2",)
        assert half.cer_pct == 50.0


class TestEvaluate:
    def test_report_fields(self, tmp_path):
        out, truth = build_aug(tmp_path, [(f"{i}.png", w) for i, w in enumerate(["ab", "cd", "ef"])])
        report = evaluate(out, truth)
        assert report.cer_pct == 0.0
        assert report.wer_pct == 0.0
        assert report.overall_qa_accuracy == 1.0
        assert report.evaluated == 3
        assert report.wer_mode == "exact"
        obj = report.to_obj()
        assert set(obj) >= {"cer_pct", "wer_pct", "qa_accuracy", "overall_qa_accuracy"}
        text = report.render()
        assert "CER" in text and "WER" in text

    def test_case_fold_follows_header(self, tmp_path):
        out, truth = build_aug(tmp_path, [("1.png", "Hello")], case_fold=True)
        report = evaluate(out, {"1": "HELLO"})
        assert report.cer_pct == 0.0
        assert report.case_fold is True

    def test_multi_pass_dedupes_references(self, tmp_path):
        samples = parse_manifest(write_tsv(tmp_path / "m.tsv", [("1.png", "ab")]))
        header, records = augment_samples(samples, SamplingConfig(seed=3, passes=4))
        out = tmp_path / "aug.jsonl"
        write_augmented(records, header, out)
        report = evaluate(out, {"1": "ab"})
        assert report.evaluated == 1  # one unique sample, not four


class TestLoadPredictions:
    def test_basic(self, tmp_path):
        path = tmp_path / "p.tsv"
        path.write_text("a\tHELLO\nb\t\nc\tx\ty\n", encoding="utf-8")
        preds = load_predictions(path)
        assert preds == {"a": "HELLO", "b": "", "c": "x\ty"}

    def test_duplicate_id(self, tmp_path):
        path = tmp_path / "p.tsv"
        path.write_text("a\tx\na\ty\n", encoding="utf-8")
        with pytest.raises(DuplicateId):
            load_predictions(path)

    def test_missing_tab(self, tmp_path):
        path = tmp_path / "p.tsv"
        path.write_text("a\n", encoding="utf-8")
        with pytest.raises(MalformedRow):
            load_predictions(path)


@given(st.lists(st.text(alphabet="abcXYZ", min_size=1, max_size=10), min_size=1, max_size=8))
@settings(max_examples=60, deadline=None)
def test_cer_zero_iff_identical(texts):
    refs = [
        type("R", (), {"id": str(i), "word": make_word(t)})()
        for i, t in enumerate(texts)
    ]
    exact = {str(i): t for i, t in enumerate(texts)}
    assert cer(exact, refs) == 0.0
    mutated = dict(exact)
    mutated["0"] = exact["0"] + "!"
    assert cer(mutated, refs) > 0.0
