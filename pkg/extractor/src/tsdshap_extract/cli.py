"""Command-line front end: ``tsdshap-extract lm`` and ``tsdshap-extract wordvec``.

Exit codes: 0 success, 1 usage error, 2 data or model error.
"""

from __future__ import annotations

import argparse
import sys

from .lm import DEFAULT_BATCH_SIZE, DEFAULT_MAX_LENGTH, POOLING_MODES, ExtractionSpec, extract_lm_representations
from .wordvec import average_word_vectors


class _Parser(argparse.ArgumentParser):
    # reserve exit code 2 for data errors; argparse defaults usage errors to 2
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> _Parser:
    parser = _Parser(prog="tsdshap-extract", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("lm", help="pooled penultimate-layer transformer representations")
    p.add_argument("--model", required=True, help="model identifier or local directory")
    p.add_argument("--texts", required=True, help="input file, one example per line")
    p.add_argument("--pooling", choices=POOLING_MODES, default="classification-token")
    p.add_argument("--batch-size", type=int, default=DEFAULT_BATCH_SIZE)
    p.add_argument("--max-length", type=int, default=DEFAULT_MAX_LENGTH)
    p.add_argument("--out", required=True, help="TSDS output path")

    p = sub.add_parser("wordvec", help="averaged pre-trained word vectors")
    p.add_argument("--vectors", required=True, help="token-vector table file")
    p.add_argument("--texts", required=True, help="input file, one example per line")
    p.add_argument("--out", required=True, help="TSDS output path")

    return parser


def run(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.subcommand == "lm":
            matrix = extract_lm_representations(
                ExtractionSpec(
                    model=args.model,
                    texts_path=args.texts,
                    pooling=args.pooling,
                    output_path=args.out,
                    batch_size=args.batch_size,
                    max_length=args.max_length,
                )
            )
        else:
            matrix = average_word_vectors(args.vectors, args.texts, args.out)
    except (ValueError, OSError) as exc:
        print(f"tsdshap-extract {args.subcommand}: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {matrix.shape[0]}x{matrix.shape[1]} matrix to {args.out}")
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
