from __future__ import annotations

from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from charqa.errors import BadConfigLine, InvalidDistribution, UnknownPreset
from charqa.sampling import (
    PRESETS,
    RandomSource,
    SamplingConfig,
    parse_config_file,
    preset,
    sample_category,
    validate_probs,
)
from charqa.taxonomy import Category


def test_preset_values():
    assert preset("wordart") == (0.30, 0.30, 0.25, 0.15)
    assert preset("esposalles") == (0.30, 0.25, 0.30, 0.15)
    assert preset("uniform") == (0.25, 0.25, 0.25, 0.25)
    assert set(PRESETS) == {"wordart", "esposalles", "uniform"}


def test_unknown_preset():
    with pytest.raises(UnknownPreset):
        preset("iam")


@pytest.mark.parametrize(
    "probs",
    [
        (0.5, 0.5),
        (0.3, 0.3, 0.3, 0.3),
        (-0.1, 0.5, 0.3, 0.3),
        (0.25, 0.25, 0.25, 0.2499),
    ],
)
def test_bad_distributions(probs):
    with pytest.raises(InvalidDistribution):
        validate_probs(probs)


def test_distribution_tolerance_boundary():
    validate_probs((0.1, 0.2, 0.3, 0.4 + 5e-10))
    with pytest.raises(InvalidDistribution):
        validate_probs((0.1, 0.2, 0.3, 0.4 + 5e-9))


class _FixedUniform:
    def __init__(self, u: float):
        self.u = u

    def random(self) -> float:
        return self.u


def test_degenerate_distribution_always_presence():
    cfg = SamplingConfig(probs=(1.0, 0.0, 0.0, 0.0), seed=3)
    for i in range(25):
        rng = RandomSource.for_sample(3, 0, f"s{i}")
        assert sample_category(cfg, rng) is Category.PRESENCE


def test_inverse_cdf_boundaries():
    cfg = SamplingConfig(probs=(0.25, 0.25, 0.25, 0.25), seed=0)
    # intervals: [0,.25) presence, [.25,.5) positional, [.5,.75) structural
    assert sample_category(cfg, _FixedUniform(0.0)) is Category.PRESENCE
    assert sample_category(cfg, _FixedUniform(0.3)) is Category.POSITIONAL
    assert sample_category(cfg, _FixedUniform(0.6)) is Category.STRUCTURAL
    assert sample_category(cfg, _FixedUniform(0.9999)) is Category.BOUNDARY


def test_empirical_distribution_sanity():
    # A light version of the full 100k acceptance check.
    cfg = SamplingConfig(probs=preset("esposalles"), seed=11)
    counts = Counter()
    rng = RandomSource.for_sample(11, 0, "stream")
    n = 20_000
    for _ in range(n):
        counts[sample_category(cfg, rng)] += 1
    for p, cat in zip(cfg.probs, (Category.PRESENCE, Category.POSITIONAL, Category.STRUCTURAL, Category.BOUNDARY)):
        assert abs(counts[cat] / n - p) < 0.02


class TestRandomSource:
    def test_same_key_same_stream(self):
        a = RandomSource.for_sample(42, 0, "w1")
        b = RandomSource.for_sample(42, 0, "w1")
        assert [a.random() for _ in range(5)] == [b.random() for _ in range(5)]

    def test_distinct_ids_distinct_streams(self):
        a = RandomSource.for_sample(42, 0, "w1")
        b = RandomSource.for_sample(42, 0, "w2")
        assert [a.random() for _ in range(5)] != [b.random() for _ in range(5)]

    def test_distinct_passes_distinct_streams(self):
        a = RandomSource.for_sample(42, 0, "w1")
        b = RandomSource.for_sample(42, 1, "w1")
        assert [a.random() for _ in range(5)] != [b.random() for _ in range(5)]

    def test_algorithm_name(self):
        assert RandomSource.ALGORITHM == "mt19937-sha256-v1"

    @given(st.integers(min_value=0, max_value=2**64 - 1))
    @settings(max_examples=50)
    def test_uniform_in_unit_interval(self, seed):
        rng = RandomSource.for_sample(seed, 0, "x")
        u = rng.random()
        assert 0.0 <= u < 1.0


class TestSamplingConfig:
    def test_defaults(self):
        cfg = SamplingConfig()
        assert cfg.probs == (0.25, 0.25, 0.25, 0.25)
        assert cfg.seed == 0
        assert cfg.passes == 1
        assert cfg.charset_policy == "infer"

    def test_explicit_charset_policy(self):
        cfg = SamplingConfig(charset="ABC")
        assert cfg.charset_policy == "explicit"

    def test_seed_range(self):
        SamplingConfig(seed=2**64 - 1)
        with pytest.raises(ValueError):
            SamplingConfig(seed=-1)
        with pytest.raises(ValueError):
            SamplingConfig(seed=2**64)

    def test_passes_positive(self):
        with pytest.raises(ValueError):
            SamplingConfig(passes=0)

    def test_probs_validated(self):
        with pytest.raises(InvalidDistribution):
            SamplingConfig(probs=(0.9, 0.9, 0.0, 0.0))


class TestConfigFile:
    def test_full_config(self):
        text = "\n".join(
            [
                "# generation settings",
                "preset = wordart",
                "seed = 12",
                "passes = 3",
                "case_fold = true",
                "charset = ABCDEF",
                "threads = 2",
                "",
            ]
        )
        got = parse_config_file(text)
        assert got == {
            "probs": (0.30, 0.30, 0.25, 0.15),
            "seed": 12,
            "passes": 3,
            "case_fold": True,
            "charset": "ABCDEF",
            "threads": 2,
        }

    def test_explicit_probs_beat_preset(self):
        got = parse_config_file("probs = 1, 0, 0, 0\npreset = wordart\n")
        assert got["probs"] == (1.0, 0.0, 0.0, 0.0)

    def test_unknown_key(self):
        with pytest.raises(BadConfigLine):
            parse_config_file("sede = 3")

    def test_bad_integer(self):
        with pytest.raises(BadConfigLine):
            parse_config_file("seed = twelve")

    def test_bad_boolean(self):
        with pytest.raises(BadConfigLine):
            parse_config_file("case_fold = maybe")

    def test_missing_equals(self):
        with pytest.raises(BadConfigLine):
            parse_config_file("seed 12")

    def test_empty_and_comments_only(self):
        assert parse_config_file("\n# nothing\n\n") == {}
