"""Command line front end.

Subcommands:
  generate   read manifests, attach QA pairs, write an augmented JSONL file
  validate   recompute every stored answer and report mismatches
  score      evaluate a predictions file against an augmented file
  stats      print distribution summaries for an augmented file

Exit codes: 0 success, 1 validation or content failure, 2 format or
version refusal, 64 command line usage error.  Progress and diagnostics
go to stderr; reports and summaries go to stdout.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from collections import Counter
from pathlib import Path
from typing import Sequence

from .dataset import (
    MANIFEST_FORMATS,
    augment_samples,
    load_augmented,
    merge_manifests,
    parse_manifest,
    validate_augmented,
    write_augmented,
)
from .errors import (
    BadConfigLine,
    CharQaError,
    InvalidDistribution,
    MalformedRecord,
    MalformedRow,
    UnknownPreset,
    UnknownTemplateVersion,
)
from .metrics import evaluate, load_predictions
from .sampling import PRESETS, SamplingConfig, parse_config_file, preset, validate_probs
from .taxonomy import AnswerKind, Category, Subcategory

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_FORMAT = 2
EXIT_USAGE = 64

_DEFAULTS = {
    "probs": (0.25, 0.25, 0.25, 0.25),
    "seed": 0,
    "passes": 1,
    "case_fold": False,
    "charset": None,
    "threads": 1,
}


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that exits with the usage code instead of 2."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _progress(message: str) -> None:
    print(message, file=sys.stderr)


def _parse_probs(text: str) -> tuple[float, float, float, float]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4:
        raise InvalidDistribution(f"expected 4 comma separated probabilities, got {len(parts)}")
    try:
        values = tuple(float(p) for p in parts)
    except ValueError as exc:
        raise InvalidDistribution(f"non-numeric probability in {text!r}") from exc
    validate_probs(values)
    return values  # type: ignore[return-value]


def build_parser() -> _Parser:
    parser = _Parser(prog="charqa", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    gen = sub.add_parser("generate", help="augment a manifest with QA pairs")
    gen.add_argument(
        "--manifest",
        action="append",
        required=True,
        metavar="PATH",
        help="input manifest; repeat to merge several",
    )
    gen.add_argument("--format", choices=MANIFEST_FORMATS, default="generic_tsv")
    gen.add_argument("--out", required=True, metavar="PATH", help="augmented JSONL output path")
    group = gen.add_mutually_exclusive_group()
    group.add_argument("--preset", choices=sorted(PRESETS), help="named category distribution")
    group.add_argument("--probs", metavar="P,P,P,P", help="explicit category distribution")
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("--passes", type=int, default=None)
    gen.add_argument("--case-fold", action="store_const", const=True, default=None)
    gen.add_argument("--charset", default=None, help="explicit charset (default: inferred)")
    gen.add_argument("--threads", type=int, default=None)
    gen.add_argument("--config", metavar="PATH", help="key = value config file")

    val = sub.add_parser("validate", help="recompute answers in an augmented file")
    val.add_argument("augmented", metavar="AUGMENTED")

    sco = sub.add_parser("score", help="score a predictions file")
    sco.add_argument("augmented", metavar="AUGMENTED")
    sco.add_argument("--preds", required=True, metavar="PATH", help="tab separated id/prediction file")
    sco.add_argument("--token-wer", action="store_true", help="token edit distance instead of exact match")
    sco.add_argument("--report", metavar="PATH", help="also write the report as JSON")

    sta = sub.add_parser("stats", help="summarize an augmented file")
    sta.add_argument("augmented", metavar="AUGMENTED")

    return parser


def _resolve_generate_config(args: argparse.Namespace) -> SamplingConfig:
    resolved = dict(_DEFAULTS)
    if args.config:
        resolved.update(parse_config_file(Path(args.config).read_text(encoding="utf-8")))
    if args.preset is not None:
        resolved["probs"] = preset(args.preset)
    if args.probs is not None:
        resolved["probs"] = _parse_probs(args.probs)
    for key in ("seed", "passes", "case_fold", "charset", "threads"):
        value = getattr(args, key)
        if value is not None:
            resolved[key] = value
    return SamplingConfig(
        probs=tuple(resolved["probs"]),
        seed=int(resolved["seed"]),
        case_fold=bool(resolved["case_fold"]),
        charset=resolved["charset"],
        passes=int(resolved["passes"]),
        threads=int(resolved["threads"]),
    )


def _write_run_manifest(out_path: Path, payload: dict) -> None:
    path = Path(str(out_path) + ".run.json")
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _category_histogram(records) -> Counter:
    counts: Counter = Counter()
    for rec in records:
        counts[Category(rec.sampled_category).name.lower()] += 1
    return counts


def _binary_balance(records) -> tuple[int, int]:
    yes = no = 0
    for rec in records:
        for pair in rec.qa:
            if pair.answer.kind is AnswerKind.BINARY:
                if pair.answer.value == "Yes":
                    yes += 1
                else:
                    no += 1
    return yes, no


def _print_histogram(title: str, counts: Counter, total: int) -> None:
    print(title)
    if total == 0:
        print("  (none)")
        return
    for name, n in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])):
        print(f"  {name:<12} {n:>8}  {100.0 * n / total:6.2f}%")


def cmd_generate(args: argparse.Namespace) -> int:
    started = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    config = _resolve_generate_config(args)
    batches = []
    for path in args.manifest:
        batch = parse_manifest(Path(path), fmt=args.format)
        _progress(f"parsed {len(batch)} samples from {path}")
        batches.append(batch)
    samples = merge_manifests(batches) if len(batches) > 1 else batches[0]

    header, records = augment_samples(samples, config)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    count = write_augmented(records, header, out)
    _progress(f"wrote {count} records to {out}")

    _write_run_manifest(
        out,
        {
            "command": "generate",
            "inputs": list(args.manifest),
            "format": args.format,
            "output": str(out),
            "records": count,
            "config": {
                "probs": list(config.probs),
                "seed": config.seed,
                "passes": config.passes,
                "case_fold": config.case_fold,
                "charset": config.charset_policy,
                "threads": config.threads,
                "template_version": config.template_version,
                "rng": header["rng"],
                "charset_hash": header["charset_hash"],
            },
            "started": started,
            "finished": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        },
    )

    print(f"records: {count} ({len(samples)} samples x {config.passes} passes)")
    _print_histogram("sampled categories:", _category_histogram(records), count)
    yes, no = _binary_balance(records)
    binary_total = yes + no
    if binary_total:
        print(f"binary answers: Yes {100.0 * yes / binary_total:.2f}% / No {100.0 * no / binary_total:.2f}%")
    else:
        print("binary answers: (none)")
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    report = validate_augmented(Path(args.augmented))
    print(f"records: {report.total}")
    print(f"passed: {report.passed}")
    print(f"failed: {report.total - report.passed}")
    for failure in report.failures:
        print(
            f"  line {failure.line_no} id={failure.sample_id} pair={failure.pair_index}: "
            f"expected {failure.expected!r}, stored {failure.stored!r}"
        )
    return EXIT_OK if report.ok else EXIT_FAILURE


def cmd_score(args: argparse.Namespace) -> int:
    preds = load_predictions(Path(args.preds))
    _progress(f"loaded {len(preds)} predictions from {args.preds}")
    report = evaluate(Path(args.augmented), preds, token_level=args.token_wer)
    print(report.render())
    if args.report:
        report_path = Path(args.report)
        report_path.parent.mkdir(parents=True, exist_ok=True)
        report_path.write_text(
            json.dumps(report.to_obj(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        _progress(f"wrote report to {report_path}")
    return EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    header, records = load_augmented(Path(args.augmented))
    print(
        f"records: {len(records)} "
        f"(template={header['template_version']}, seed={header['seed']}, passes={header['passes']})"
    )
    print(f"probs: {header['probs']}")

    categories: Counter = Counter()
    subcategories: Counter = Counter()
    answer_kinds: Counter = Counter()
    yes = no = 0
    lengths: list[int] = []
    for rec in records:
        categories[Category(rec.category).name.lower()] += 1
        lengths.append(len(rec.text))
        for pair in rec.qa:
            subcategories[Subcategory(pair.spec.subcategory).value] += 1
            answer_kinds[pair.kind.value] += 1
            if pair.kind is AnswerKind.BINARY:
                if pair.stored_answer == "Yes":
                    yes += 1
                elif pair.stored_answer == "No":
                    no += 1

    _print_histogram("sampled categories:", categories, len(records))
    _print_histogram("subcategories:", subcategories, sum(subcategories.values()))
    _print_histogram("answer types:", answer_kinds, sum(answer_kinds.values()))
    binary_total = yes + no
    if binary_total:
        print(f"binary answers: Yes {100.0 * yes / binary_total:.2f}% / No {100.0 * no / binary_total:.2f}%")
    else:
        print("binary answers: (none)")
    if lengths:
        mean = sum(lengths) / len(lengths)
        print(
            f"transcription length: min={min(lengths)} mean={mean:.2f} max={max(lengths)}"
        )
    else:
        print("transcription length: (none)")
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    handlers = {
        "generate": cmd_generate,
        "validate": cmd_validate,
        "score": cmd_score,
        "stats": cmd_stats,
    }
    try:
        return handlers[args.command](args)
    except (UnknownTemplateVersion, MalformedRecord, MalformedRow) as exc:
        print(f"charqa: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except (UnknownPreset, InvalidDistribution, BadConfigLine) as exc:
        print(f"charqa: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CharQaError as exc:
        print(f"charqa: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except OSError as exc:
        print(f"charqa: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    raise SystemExit(main())
