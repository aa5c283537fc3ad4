"""Command-line entry point for the embedding exporter."""

from __future__ import annotations

import argparse
import sys

from .exporter import ExportConfig, export_embeddings


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embed-export",
        description="Encode a corpus JSONL with a sentence encoder and write EMB1.",
    )
    parser.add_argument("--input", required=True, help="corpus JSONL path")
    parser.add_argument("--output", required=True, help="EMB1 output path")
    parser.add_argument(
        "--model",
        default="sentence-transformers/all-MiniLM-L6-v2",
        help="sentence-transformers model id, or hashing:<dim> for the "
        "offline deterministic encoder",
    )
    parser.add_argument("--batch-size", type=int, default=32)
    return parser


def run(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    config = ExportConfig(
        input_path=args.input,
        output_path=args.output,
        model=args.model,
        batch_size=args.batch_size,
    )
    try:
        meta = export_embeddings(config)
    except (ValueError, OSError) as exc:
        print(f"embed-export: error: {exc}", file=sys.stderr)
        return 2
    print(
        f"embed-export: wrote {meta['n_docs']} x {meta['dim']} embeddings "
        f"({meta['encoder']})",
        file=sys.stderr,
    )
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
