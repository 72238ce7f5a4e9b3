"""CLI for the text-to-vector adapter: embdepth-embed INPUT --out OUTPUT."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .adapter import DEFAULT_MODEL, AdapterError, EmbedJob, embed_corpus


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embdepth-embed",
        description="Embed a JSONL text corpus into the embdepth vector wire format",
    )
    parser.add_argument("input", type=Path, help="JSONL with id, text, optional label/text_pair")
    parser.add_argument("--out", type=Path, required=True, help="output vector JSONL path")
    parser.add_argument(
        "--model", default=DEFAULT_MODEL,
        help=f"model identifier, or hash:<dim> for the offline backend "
             f"(default: {DEFAULT_MODEL})",
    )
    parser.add_argument("--batch-size", type=int, default=32)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        job = EmbedJob(
            input_path=args.input, output_path=args.out,
            model=args.model, batch_size=args.batch_size,
        )
        count = embed_corpus(job)
    except AdapterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {count} records to {args.out}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
