"""Command-line interface.

Four subcommands: ``generate`` runs the pipeline from a JSON config,
``kg-index`` compiles an assertion dump into the binary index format,
``stats`` summarizes a dataset file and ``eval`` scores it with a
baseline.  Exit codes: 0 success, 1 usage or configuration error, 2
unreadable or invalid input resource, 3 output I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections import Counter

from .errors import (
    AnnotationError,
    ConfigError,
    CorpusFormatError,
    GazetteerError,
    KnowledgeBaseError,
    ResourceError,
)
from .evaluate import EVAL_METHODS, evaluate
from .kg import build_index, save_index
from .pipeline import PipelineConfig, generate_dataset, stats

_RESOURCE_ERRORS = (
    AnnotationError,
    CorpusFormatError,
    GazetteerError,
    KnowledgeBaseError,
    ResourceError,
    FileNotFoundError,
)


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; this tool reserves 2 for
    # resource problems, so usage errors are remapped to 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


_DESCRIPTION = (
    "Synthesize and evaluate multiple-choice QA datasets. Exit codes: "
    "0 success, 1 usage or configuration error, 2 unreadable or invalid "
    "input resource, 3 output I/O failure."
)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mcqgen", description=_DESCRIPTION)
    sub = parser.add_subparsers(dest="command", required=True)

    p_generate = sub.add_parser("generate", help="generate a dataset from a config file")
    p_generate.add_argument("--config", required=True, help="JSON pipeline configuration")
    p_generate.add_argument("--out", required=True, help="output directory")

    p_index = sub.add_parser("kg-index", help="compile an assertion dump into a binary index")
    p_index.add_argument("--assertions", required=True, help="tab-separated assertion dump")
    p_index.add_argument("--lang", default="en", help="language code to keep (default: en)")
    p_index.add_argument("--out", required=True, help="output index file")

    p_stats = sub.add_parser("stats", help="summarize a dataset file")
    p_stats.add_argument("--data", required=True, help="dataset (.jsonl) file")

    p_eval = sub.add_parser("eval", help="run a baseline over a dataset file")
    p_eval.add_argument("--data", required=True, help="dataset (.jsonl) file")
    p_eval.add_argument("--method", required=True, choices=EVAL_METHODS)
    p_eval.add_argument("--seed", type=int, default=0, help="seed for the random baseline")
    return parser


def _cmd_generate(args) -> int:
    config = PipelineConfig.from_file(args.config)
    report = generate_dataset(config, args.out)
    summary = {
        "out_dir": args.out,
        "emitted": report.emitted_total,
        "dropped": report.dropped_total,
        "train_samples": report.train_samples,
        "dev_samples": report.dev_samples,
    }
    print(json.dumps(summary, indent=2))
    return 0


def _cmd_kg_index(args) -> int:
    tally: Counter = Counter()
    try:
        index = build_index(args.assertions, args.lang, tally)
    except OSError as exc:
        raise ResourceError(f"cannot read assertions: {exc}") from exc
    save_index(index, args.out)
    summary = {
        "out": args.out,
        "nodes": len(index.nodes),
        "edges": index.edge_count,
        "relations": len(index.relations),
        "skipped": dict(sorted(tally.items())),
    }
    print(json.dumps(summary, indent=2))
    return 0


def _cmd_stats(args) -> int:
    print(json.dumps(stats(args.data), indent=2))
    return 0


def _cmd_eval(args) -> int:
    result = evaluate(args.data, args.method, args.seed)
    print(json.dumps(result.to_dict(), indent=2))
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "kg-index": _cmd_kg_index,
    "stats": _cmd_stats,
    "eval": _cmd_eval,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"mcqgen: config error: {exc}", file=sys.stderr)
        return 1
    except _RESOURCE_ERRORS as exc:
        print(f"mcqgen: resource error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"mcqgen: i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
