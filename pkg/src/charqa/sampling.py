"""Probabilistic category selection and the reproducible random-source contract.

One attribute category is drawn per sample via inverse CDF on a single
uniform draw, with cumulative boundaries in the fixed order Presence,
Positional, Structural, Boundary.

Every sample gets its own substream, keyed on (seed, pass index, sample id)
through SHA-256, so generated content is independent of manifest row order
and of how work is distributed across threads. The underlying generator is
CPython's Mersenne Twister; reproducibility is promised only within the
algorithm named by RandomSource.ALGORITHM, which is recorded in every output
header.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field

from .errors import BadConfigLine, InvalidDistribution, UnknownPreset
from .taxonomy import ATTRIBUTE_CATEGORIES, TEMPLATE_VERSION, Category

PROB_SUM_TOLERANCE = 1e-9

# Final probability assignments for {Presence, Positional, Structural, Boundary}.
PRESETS: dict[str, tuple[float, float, float, float]] = {
    "wordart": (0.30, 0.30, 0.25, 0.15),
    "esposalles": (0.30, 0.25, 0.30, 0.15),
    "uniform": (0.25, 0.25, 0.25, 0.25),
}


def preset(name: str) -> tuple[float, float, float, float]:
    """Category probabilities for a named preset."""
    try:
        return PRESETS[name]
    except KeyError:
        raise UnknownPreset(f"unknown preset {name!r}; known: {', '.join(sorted(PRESETS))}") from None


class RandomSource:
    """Named deterministic generator with per-sample substream derivation."""

    ALGORITHM = "mt19937-sha256-v1"

    def __init__(self, seed: int):
        self._rng = random.Random(seed)

    def random(self) -> float:
        """Uniform draw in [0, 1)."""
        return self._rng.random()

    def randrange(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        return self._rng.randrange(n)

    @classmethod
    def for_sample(cls, seed: int, pass_index: int, sample_id: str) -> "RandomSource":
        """Substream for one sample; stable under manifest reordering."""
        key = f"{seed}|{pass_index}|{sample_id}".encode("utf-8")
        digest = hashlib.sha256(key).digest()
        return cls(int.from_bytes(digest[:8], "big"))


@dataclass(frozen=True)
class SamplingConfig:
    """Everything generation needs to be reproducible."""

    probs: tuple[float, float, float, float] = PRESETS["uniform"]
    seed: int = 0
    case_fold: bool = False
    charset: str | None = None  # None: infer from the dataset
    passes: int = 1
    template_version: str = TEMPLATE_VERSION
    threads: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))
        validate_probs(self.probs)
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.passes < 1:
            raise ValueError(f"passes must be >= 1, got {self.passes}")
        if self.threads < 1:
            raise ValueError(f"threads must be >= 1, got {self.threads}")

    @property
    def charset_policy(self) -> str:
        return "infer" if self.charset is None else "explicit"


def validate_probs(probs) -> tuple[float, float, float, float]:
    """Check the four category probabilities sum to 1 and are non-negative."""
    probs = tuple(float(p) for p in probs)
    if len(probs) != len(ATTRIBUTE_CATEGORIES):
        raise InvalidDistribution(f"need {len(ATTRIBUTE_CATEGORIES)} probabilities, got {len(probs)}")
    if any(p < 0 for p in probs):
        raise InvalidDistribution(f"probabilities must be non-negative: {probs}")
    total = sum(probs)
    if abs(total - 1.0) > PROB_SUM_TOLERANCE:
        raise InvalidDistribution(f"probabilities sum to {total!r}, expected 1")
    return probs


def sample_category(cfg: SamplingConfig, rng: RandomSource) -> Category:
    """Draw one attribute category by inverse CDF on a single uniform draw."""
    u = rng.random()
    cumulative = 0.0
    for p, cat in zip(cfg.probs, ATTRIBUTE_CATEGORIES):
        cumulative += p
        if u < cumulative:
            return cat
    return ATTRIBUTE_CATEGORIES[-1]  # float drift guard; u in [0,1)


# --- config file -------------------------------------------------------------

_CONFIG_KEYS = {"preset", "probs", "seed", "passes", "case_fold", "charset", "threads"}
_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def parse_config_file(text: str) -> dict:
    """Parse the `key = value` config format into override kwargs.

    Recognized keys: preset, probs (four comma-separated numbers), seed,
    passes, threads, case_fold, charset. Blank lines and '#' comments are
    ignored. A `preset` line expands to its probability vector; an explicit
    `probs` line wins over `preset` regardless of order.
    """
    overrides: dict = {}
    preset_probs: tuple[float, float, float, float] | None = None
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise BadConfigLine(line_no, f"expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _CONFIG_KEYS:
            raise BadConfigLine(line_no, f"unknown key {key!r}")
        if key == "preset":
            preset_probs = preset(value)
        elif key == "probs":
            parts = [p.strip() for p in value.split(",")]
            try:
                overrides["probs"] = validate_probs(parts)
            except ValueError as exc:
                raise BadConfigLine(line_no, f"bad probability list {value!r}") from exc
        elif key in ("seed", "passes", "threads"):
            try:
                overrides[key] = int(value)
            except ValueError:
                raise BadConfigLine(line_no, f"{key} wants an integer, got {value!r}") from None
        elif key == "case_fold":
            lowered = value.lower()
            if lowered not in _TRUE | _FALSE:
                raise BadConfigLine(line_no, f"boolean expected, got {value!r}")
            overrides[key] = lowered in _TRUE
        elif key == "charset":
            overrides[key] = value
    if preset_probs is not None and "probs" not in overrides:
        overrides["probs"] = preset_probs
    return overrides
