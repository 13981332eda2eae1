"""Command-line front end: extract embeddings or fine-tune a classifier.

Exit codes: 0 success, 1 validation or runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys

import rhetembed
from rhetembed.encoders import SUPPORTED_ENCODERS
from rhetembed.errors import EmbedderError
from rhetembed.extract import EmbedJob, extract_embeddings
from rhetembed.finetune import FinetuneJob, finetune_and_predict


def _add_encoder_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--encoder", choices=SUPPORTED_ENCODERS, default="bert-base")
    p.add_argument(
        "--weights",
        metavar="DIR",
        help="local directory with pretrained weights; otherwise the model "
        "cache is tried, then a seeded randomly initialized stand-in",
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--layers", type=int, metavar="N", help="depth of the random-init stand-in"
    )
    p.add_argument("--max-length", type=int, default=128, metavar="TOKENS")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rhetembed",
        description="Transformer companion tools for the relation pipeline",
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"rhetembed {rhetembed.__version__}",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("extract", help="embed EDU pairs with a frozen encoder")
    p.add_argument("--input", required=True, metavar="PAIRS_CSV")
    p.add_argument("--output", required=True, metavar="JSONL")
    _add_encoder_options(p)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument(
        "--vocab-corpus",
        metavar="PAIRS_CSV",
        help="derive the stand-in's vocabulary from this file instead of "
        "--input, so separate splits share one encoder",
    )
    p.set_defaults(run=_cmd_extract)

    p = sub.add_parser("finetune", help="fine-tune a relation classifier")
    p.add_argument("--train", required=True, metavar="PAIRS_CSV")
    p.add_argument("--validation", required=True, metavar="PAIRS_CSV")
    p.add_argument("--test", required=True, metavar="PAIRS_CSV")
    p.add_argument("--predictions", required=True, metavar="CSV")
    p.add_argument("--metrics", required=True, metavar="JSON")
    _add_encoder_options(p)
    p.add_argument("--batch-size", type=int, default=64)
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--learning-rate", type=float, default=2e-5)
    p.add_argument("--weight-decay", type=float, default=0.01)
    p.set_defaults(run=_cmd_finetune)

    return parser


def _check_layers(args, parser: argparse.ArgumentParser) -> None:
    if args.weights and args.layers is not None:
        parser.error("--layers applies only to the random-init stand-in, not --weights")


def _cmd_extract(args) -> None:
    job = EmbedJob(
        input_path=args.input,
        output_path=args.output,
        encoder=args.encoder,
        weights_path=args.weights,
        seed=args.seed,
        layers=args.layers,
        max_length=args.max_length,
        batch_size=args.batch_size,
        vocab_corpus_path=args.vocab_corpus,
    )
    count = extract_embeddings(job)
    print(f"wrote {count} vectors to {args.output}")


def _cmd_finetune(args) -> None:
    job = FinetuneJob(
        train_path=args.train,
        validation_path=args.validation,
        test_path=args.test,
        predictions_path=args.predictions,
        metrics_path=args.metrics,
        encoder=args.encoder,
        batch_size=args.batch_size,
        epochs=args.epochs,
        learning_rate=args.learning_rate,
        weight_decay=args.weight_decay,
        seed=args.seed,
        weights_path=args.weights,
        layers=args.layers,
        max_length=args.max_length,
    )

    def show(record: dict) -> None:
        print(
            "epoch {epoch}/{total}  train_loss={train_loss:.4f}  "
            "val_loss={validation_loss:.4f}  val_acc={validation_accuracy:.4f}  "
            "val_f1={validation_weighted_f1:.4f}".format(total=job.epochs, **record)
        )

    finetune_and_predict(job, on_epoch=show)
    print(f"wrote predictions to {args.predictions}")
    print(f"wrote metrics to {args.metrics}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _check_layers(args, parser)
    try:
        args.run(args)
    except (EmbedderError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
