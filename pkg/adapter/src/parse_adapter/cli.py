"""parse-adapter command line: JSONL questions in, CoNLL-U out."""

from __future__ import annotations

import argparse
import logging
import sys

from .adapter import DEFAULT_MODEL, AdapterConfig, InputError, parse_corpus
from .backends import AdapterStartupError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="parse-adapter",
        description="Parse benchmark questions into CoNLL-U dependency trees",
    )
    parser.add_argument("--input", required=True, help="dataset JSONL (id, question, ...)")
    parser.add_argument("--output", required=True, help="CoNLL-U file to write")
    parser.add_argument("--model", default=DEFAULT_MODEL,
                        help="'builtin' or 'spacy:<pipeline>' (default: %(default)s)")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = AdapterConfig(
            input_path=args.input, output_path=args.output,
            parser_model_name=args.model,
        )
        stats = parse_corpus(config)
    except (AdapterStartupError, InputError, FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    skipped = f", skipped {len(stats['skipped'])}" if stats["skipped"] else ""
    print(f"parsed {stats['written']}/{stats['questions']} questions "
          f"with {stats['parser']}{skipped} -> {args.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
