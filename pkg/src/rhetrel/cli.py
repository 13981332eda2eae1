"""Command-line pipeline: ingest, split, balance, featurize, train,
evaluate, analyze, report.

Every subcommand writes its outputs plus a run manifest into --out-dir.
Data artifacts (CSV, JSON, feature archives, SVG) are byte-identical
across reruns with the same inputs, flags, and seed; the manifest is
the one output that carries a wall-clock timestamp.  Exit codes: 0 on
success, 1 on a validation failure (diagnostics on stderr, one per
line, with file and row/line context), 2 on a usage error.

The default seed comes from the RHETREL_SEED environment variable when
a subcommand takes --seed and none is given; absent both, it is 0.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from rhetrel import __version__
from rhetrel.corpus import (
    parse_pair_csv,
    parse_standoff,
    pairs_from_document,
    class_histogram,
    write_pair_csv,
)
from rhetrel.dataset import encode_labels, oversample, stratified_split
from rhetrel.errors import MalformedProbRow, RhetrelError
from rhetrel.evaluation import (
    evaluate,
    rank_errors,
    report_from_json,
    report_to_json,
)
from rhetrel.features import (
    DesignMatrix,
    FeatureConfig,
    build_design_matrix,
    load_embedding_file,
)
from rhetrel.labels import LabelSet
from rhetrel.manifest import (
    atomic_write_bytes,
    atomic_write_text,
    build_manifest,
    load_arrays,
    manifest_to_json,
    save_arrays,
)
from rhetrel.render import FORMATS, render_report
from rhetrel.softmax import (
    Hyperparams,
    fit,
    model_from_json,
    model_to_json,
    predict_proba,
)

_SEED_ENV = "RHETREL_SEED"


class _CliError(Exception):
    """Validation failure with ready-to-print diagnostic lines."""

    def __init__(self, *lines: str):
        super().__init__("\n".join(lines))
        self.lines = lines


def _read_text(path: str) -> str:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            return fh.read()
    except OSError as exc:
        raise _CliError(f"{path}: {exc.strerror or exc}") from None


def _with_path(path: str, fn, *args):
    try:
        return fn(*args)
    except RhetrelError as exc:
        raise _CliError(f"{path}: {exc}") from None


def _resolve_seed(value: int | None) -> int:
    if value is not None:
        return value
    raw = os.environ.get(_SEED_ENV, "").strip()
    if not raw:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise _CliError(
            f"{_SEED_ENV} must be an integer, got {raw!r}"
        ) from None


def _out_dir(args) -> str:
    os.makedirs(args.out_dir, exist_ok=True)
    return args.out_dir


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _write_manifest(
    out_dir: str,
    subcommand: str,
    parameters: dict,
    input_paths: list[str],
    outputs: list[str],
    name: str,
) -> None:
    manifest = build_manifest(
        subcommand, parameters, input_paths, outputs + [name]
    )
    atomic_write_text(os.path.join(out_dir, name), manifest_to_json(manifest))


def _parse_pairs_file(path: str, label_set: LabelSet):
    return _with_path(path, parse_pair_csv, _read_text(path), label_set)


def _load_features(path: str):
    try:
        data = load_arrays(path)
    except (OSError, ValueError) as exc:
        raise _CliError(f"{path}: not a readable feature archive: {exc}") from None
    for key in ("X", "y", "ids"):
        if key not in data:
            raise _CliError(f"{path}: feature archive is missing array {key!r}")
    meta_path = _meta_path(path)
    try:
        meta = json.loads(_read_text(meta_path))
        config = FeatureConfig.from_dict(meta["feature_config"])
        label_set = LabelSet(tuple(meta["labels"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise _CliError(f"{meta_path}: malformed feature metadata: {exc}") from None
    return data, config, label_set


def _meta_path(features_path: str) -> str:
    stem, _ = os.path.splitext(features_path)
    return stem + ".meta.json"


def _cmd_ingest(args) -> int:
    label_set = LabelSet()
    pairs = []
    for path in args.inputs:
        content = _read_text(path)
        if path.endswith(".rsta"):
            doc = _with_path(path, parse_standoff, content, label_set)
            pairs.extend(_with_path(path, pairs_from_document, doc))
        elif path.endswith(".csv"):
            pairs.extend(_with_path(path, parse_pair_csv, content, label_set))
        else:
            raise _CliError(
                f"{path}: unrecognized input type (expected .csv or .rsta)"
            )
    if not pairs:
        raise _CliError("no labeled pairs found in the inputs")
    hist = class_histogram(pairs, label_set)
    out_dir = _out_dir(args)
    atomic_write_text(os.path.join(out_dir, "pairs.csv"), write_pair_csv(pairs))
    atomic_write_text(os.path.join(out_dir, "histogram.json"), _json(hist))
    _write_manifest(
        out_dir,
        "ingest",
        {"inputs": list(args.inputs)},
        list(args.inputs),
        ["pairs.csv", "histogram.json"],
        "ingest.manifest.json",
    )
    return 0


def _cmd_split(args) -> int:
    label_set = LabelSet()
    pairs = _parse_pairs_file(args.input, label_set)
    ds = encode_labels(pairs, label_set)
    seed = _resolve_seed(args.seed)
    split = stratified_split(ds, args.ratios, seed)
    out_dir = _out_dir(args)
    outputs = []
    counts = {}
    for name, part in split.parts().items():
        file_name = f"{name}.csv"
        atomic_write_text(
            os.path.join(out_dir, file_name), write_pair_csv(part.pairs())
        )
        outputs.append(file_name)
        counts[name] = class_histogram(part.pairs(), label_set)
    _write_manifest(
        out_dir,
        "split",
        {
            "input": args.input,
            "ratios": list(args.ratios),
            "seed": seed,
            "balance_policy": args.balance_policy,
            "per_class_counts": counts,
        },
        [args.input],
        outputs,
        "split.manifest.json",
    )
    return 0


def _cmd_balance(args) -> int:
    label_set = LabelSet()
    pairs = _parse_pairs_file(args.input, label_set)
    ds = encode_labels(pairs, label_set)
    seed = _resolve_seed(args.seed)
    balanced = oversample(ds, args.target, seed)
    hist = class_histogram(balanced.pairs(), label_set)
    out_dir = _out_dir(args)
    atomic_write_text(
        os.path.join(out_dir, "balanced.csv"), write_pair_csv(balanced.pairs())
    )
    atomic_write_text(
        os.path.join(out_dir, "balanced_histogram.json"), _json(hist)
    )
    _write_manifest(
        out_dir,
        "balance",
        {
            "input": args.input,
            "target": args.target,
            "seed": seed,
            "balance_before_split": bool(args.balance_before_split),
        },
        [args.input],
        ["balanced.csv", "balanced_histogram.json"],
        "balance.manifest.json",
    )
    return 0


def _cmd_featurize(args) -> int:
    label_set = LabelSet()
    pairs = _parse_pairs_file(args.input, label_set)
    ds = encode_labels(pairs, label_set)
    table = None
    input_paths = [args.input]
    if args.mode == "embedding":
        if not args.embeddings:
            args.parser.error("--mode embedding requires --embeddings FILE")
        table = _with_path(
            args.embeddings, load_embedding_file, _read_text(args.embeddings)
        )
        input_paths.append(args.embeddings)
        config = FeatureConfig(
            mode="embedding",
            dims=args.dims,
            ngram_orders=args.orders,
            embedding_dim=args.embedding_dim,
        )
    else:
        config = FeatureConfig(
            mode="hash", dims=args.dims, ngram_orders=args.orders
        )
    dm = _with_path(args.input, build_design_matrix, ds, config, table)
    out_dir = _out_dir(args)
    stem, ext = os.path.splitext(args.output)
    if ext != ".npz":
        raise _CliError(f"--output must end in .npz, got {args.output!r}")
    save_arrays(
        os.path.join(out_dir, args.output),
        {"X": dm.X, "y": dm.y, "ids": dm.ids},
    )
    meta_name = stem + ".meta.json"
    atomic_write_text(
        os.path.join(out_dir, meta_name),
        _json(
            {
                "feature_config": config.to_dict(),
                "labels": list(label_set.labels),
            }
        ),
    )
    _write_manifest(
        out_dir,
        "featurize",
        {
            "input": args.input,
            "mode": args.mode,
            "dims": args.dims,
            "orders": list(args.orders),
            "embedding_dim": args.embedding_dim,
            "embeddings": args.embeddings,
            "output": args.output,
        },
        input_paths,
        [args.output, meta_name],
        stem + ".manifest.json",
    )
    return 0


def _cmd_train(args) -> int:
    data, config, label_set = _load_features(args.features)
    dm = _with_path(
        args.features,
        DesignMatrix,
        data["X"],
        data["y"],
        data["ids"],
        config,
    )
    hyper = Hyperparams(
        max_iter=args.max_iter,
        learning_rate=args.lr,
        l2=args.l2,
        tol=args.tol,
        backtracking=not args.no_backtracking,
    )
    seed = _resolve_seed(args.seed)
    result = fit(dm, hyper, seed=seed, label_set=label_set)
    out_dir = _out_dir(args)
    atomic_write_text(os.path.join(out_dir, "model.json"), model_to_json(result))
    loss_buf = io.StringIO()
    writer = csv.writer(loss_buf, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
    writer.writerow(["iteration", "loss"])
    for i, loss in enumerate(result.losses):
        writer.writerow([str(i), repr(float(loss))])
    atomic_write_text(os.path.join(out_dir, "losses.csv"), loss_buf.getvalue())
    _write_manifest(
        out_dir,
        "train",
        {
            "features": args.features,
            "max_iter": args.max_iter,
            "learning_rate": args.lr,
            "l2": args.l2,
            "tol": args.tol,
            "backtracking": not args.no_backtracking,
            "seed": seed,
        },
        [args.features, _meta_path(args.features)],
        ["model.json", "losses.csv"],
        "train.manifest.json",
    )
    return 0


def _prob_columns(label_set: LabelSet) -> list[str]:
    return [f"p_{name}" for name in label_set.labels]


def _write_predictions(
    path: str, ids: np.ndarray, proba: np.ndarray, label_set: LabelSet
) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
    writer.writerow(["id", "predicted_label"] + _prob_columns(label_set))
    for rid, row in zip(ids, proba):
        code = int(np.argmax(row))
        writer.writerow(
            [str(int(rid)), label_set.name(code)]
            + [repr(float(p)) for p in row]
        )
    atomic_write_bytes(path, buf.getvalue().encode("utf-8"))


def _parse_predictions(content: str, label_set: LabelSet):
    """Parse a predictions CSV into {id: (code, probs | None)}."""
    prob_names = _prob_columns(label_set)
    reader = csv.reader(io.StringIO(content, newline=""))
    try:
        rows = [row for row in reader if row]
    except csv.Error as exc:
        raise MalformedProbRow(f"unparseable CSV: {exc}") from None
    if not rows:
        raise MalformedProbRow("predictions file is empty")
    header = rows[0]
    if header[:2] != ["id", "predicted_label"]:
        raise MalformedProbRow("header must start with id,predicted_label")
    if len(header) == 2:
        with_probs = False
    elif header[2:] == prob_names:
        with_probs = True
    else:
        raise MalformedProbRow(
            "probability columns must be exactly " + ",".join(prob_names)
        )
    out: dict[int, tuple[int, list[float] | None]] = {}
    for row_no, row in enumerate(rows[1:], start=1):
        expected = 2 + (len(prob_names) if with_probs else 0)
        if len(row) != expected:
            raise MalformedProbRow(
                f"row {row_no}: expected {expected} fields, got {len(row)}"
            )
        try:
            rid = int(row[0])
        except ValueError:
            raise MalformedProbRow(
                f"row {row_no}: id must be an integer, got {row[0]!r}"
            ) from None
        if rid in out:
            raise MalformedProbRow(f"row {row_no}: duplicate id {rid}")
        label = label_set.normalize(row[1], location=row_no, kind="row")
        probs = None
        if with_probs:
            try:
                probs = [float(cell) for cell in row[2:]]
            except ValueError:
                raise MalformedProbRow(
                    f"row {row_no}: non-numeric probability"
                ) from None
        out[rid] = (label_set.code(label), probs)
    return out, with_probs


def _cmd_evaluate(args) -> int:
    if bool(args.model) == bool(args.predictions):
        args.parser.error("give exactly one of --model or --predictions")
    out_dir = _out_dir(args)
    if args.model:
        if not args.test:
            args.parser.error("--model requires --test FEATURES")
        result = _with_path(args.model, model_from_json, _read_text(args.model))
        model = result.model
        data, config, label_set = _load_features(args.test)
        proba = _with_path(args.test, predict_proba, model, data["X"])
        report = _with_path(
            args.test, evaluate, data["y"].tolist(), proba, model.label_set
        )
        _write_predictions(
            os.path.join(out_dir, "predictions.csv"),
            data["ids"],
            proba,
            model.label_set,
        )
        atomic_write_text(
            os.path.join(out_dir, "report.json"), report_to_json(report)
        )
        _write_manifest(
            out_dir,
            "evaluate",
            {"model": args.model, "test": args.test},
            [args.model, args.test, _meta_path(args.test)],
            ["report.json", "predictions.csv"],
            "evaluate.manifest.json",
        )
        return 0
    if not args.truth:
        args.parser.error("--predictions requires --truth PAIRS_CSV")
    label_set = LabelSet()
    truth_pairs = _parse_pairs_file(args.truth, label_set)
    y_true = [label_set.code(pair.label) for pair in truth_pairs]
    predictions, with_probs = _with_path(
        args.predictions,
        _parse_predictions,
        _read_text(args.predictions),
        label_set,
    )
    n = len(truth_pairs)
    for rid in predictions:
        if not 0 <= rid < n:
            raise _CliError(
                f"{args.predictions}: id {rid} has no row in {args.truth}"
            )
    missing = [i for i in range(n) if i not in predictions]
    if missing:
        raise _CliError(
            f"{args.predictions}: no prediction for id {missing[0]} "
            f"({len(missing)} ids missing)"
        )
    if with_probs:
        proba = np.array(
            [predictions[i][1] for i in range(n)], dtype=np.float64
        )
        report = _with_path(args.predictions, evaluate, y_true, proba, label_set)
    else:
        y_pred = [predictions[i][0] for i in range(n)]
        report = _with_path(args.predictions, evaluate, y_true, y_pred, label_set)
    atomic_write_text(
        os.path.join(out_dir, "report.json"), report_to_json(report)
    )
    _write_manifest(
        out_dir,
        "evaluate",
        {"predictions": args.predictions, "truth": args.truth},
        [args.predictions, args.truth],
        ["report.json"],
        "evaluate.manifest.json",
    )
    return 0


def _cmd_analyze(args) -> int:
    result = _with_path(args.model, model_from_json, _read_text(args.model))
    model = result.model
    data, config, label_set = _load_features(args.test)
    pairs = _parse_pairs_file(args.pairs, model.label_set)
    ds = encode_labels(pairs, model.label_set)
    ids = [int(v) for v in data["ids"]]
    if ids != list(range(len(pairs))):
        raise _CliError(
            f"{args.test}: feature rows do not align with {args.pairs} "
            "(ids must be that file's row numbers)"
        )
    codes = [int(v) for v in data["y"]]
    if codes != [item.y for item in ds.items]:
        raise _CliError(
            f"{args.test}: feature labels disagree with {args.pairs}"
        )
    proba = _with_path(args.test, predict_proba, model, data["X"])
    records = _with_path(args.test, rank_errors, ds, proba, args.top_k)
    payload = [
        {
            "id": record.id,
            "true_label": record.true_label,
            "predicted_label": record.predicted_label,
            "loss": record.loss,
            "edu1": record.edu1,
            "edu2": record.edu2,
        }
        for record in records
    ]
    out_dir = _out_dir(args)
    atomic_write_text(os.path.join(out_dir, "errors.json"), _json(payload))
    _write_manifest(
        out_dir,
        "analyze",
        {
            "model": args.model,
            "test": args.test,
            "pairs": args.pairs,
            "top_k": args.top_k,
        },
        [args.model, args.test, args.pairs],
        ["errors.json"],
        "analyze.manifest.json",
    )
    return 0


_REPORT_NAMES = {"text": "report.txt", "csv": "confusion.csv", "svg": "confusion.svg"}


def _cmd_report(args) -> int:
    report = _with_path(args.report, report_from_json, _read_text(args.report))
    blob = render_report(report, args.format)
    out_dir = _out_dir(args)
    name = _REPORT_NAMES[args.format]
    atomic_write_bytes(os.path.join(out_dir, name), blob)
    _write_manifest(
        out_dir,
        "report",
        {"report": args.report, "format": args.format},
        [args.report],
        [name],
        "report.manifest.json",
    )
    return 0


def _ratios_arg(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(
            "expected three comma-separated ratios, e.g. 0.6,0.2,0.2"
        )
    try:
        return tuple(float(p) for p in parts)  # type: ignore[return-value]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad ratio triple {text!r}") from None


def _orders_arg(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"bad n-gram order list {text!r}, e.g. 1,2"
        ) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rhetrel",
        description=(
            "Rhetorical-relation classification pipeline: corpus ingest, "
            "stratified splits, class balancing, featurization, softmax "
            "regression, and evaluation reports."
        ),
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser(
        "ingest", help="validate corpus files, emit pair CSV and histogram"
    )
    p.add_argument("inputs", nargs="+", metavar="FILE", help=".rsta or .csv files")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_ingest, parser=p)

    p = sub.add_parser("split", help="seeded stratified train/validation/test split")
    p.add_argument("--input", required=True, metavar="PAIRS_CSV")
    p.add_argument("--ratios", type=_ratios_arg, default=(0.6, 0.2, 0.2))
    p.add_argument("--seed", type=int, default=None)
    p.add_argument(
        "--balance-policy",
        choices=("none", "before-split", "train-only"),
        default="none",
        help="where oversampling sits relative to this split, recorded in the manifest",
    )
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_split, parser=p)

    p = sub.add_parser("balance", help="oversample every class to a common count")
    p.add_argument("--input", required=True, metavar="PAIRS_CSV")
    p.add_argument("--target", type=int, default=25)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument(
        "--balance-before-split",
        action="store_true",
        help="record that balancing happens on the full corpus, ahead of the split",
    )
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_balance, parser=p)

    p = sub.add_parser("featurize", help="build a design matrix from a pair CSV")
    p.add_argument("--input", required=True, metavar="PAIRS_CSV")
    p.add_argument("--mode", choices=("hash", "embedding"), default="hash")
    p.add_argument("--dims", type=int, default=2048)
    p.add_argument("--orders", type=_orders_arg, default=(1, 2))
    p.add_argument("--embedding-dim", type=int, default=768)
    p.add_argument("--embeddings", metavar="JSONL")
    p.add_argument("--output", default="features.npz")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_featurize, parser=p)

    p = sub.add_parser("train", help="fit the softmax-regression classifier")
    p.add_argument("--features", required=True, metavar="NPZ")
    p.add_argument("--max-iter", type=int, default=3000)
    p.add_argument("--lr", type=float, default=0.5)
    p.add_argument("--l2", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--no-backtracking", action="store_true")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_train, parser=p)

    p = sub.add_parser("evaluate", help="score a model or a predictions file")
    p.add_argument("--model", metavar="MODEL_JSON")
    p.add_argument("--test", metavar="NPZ")
    p.add_argument("--predictions", metavar="CSV")
    p.add_argument("--truth", metavar="PAIRS_CSV")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_evaluate, parser=p)

    p = sub.add_parser("analyze", help="rank the highest-loss misclassifications")
    p.add_argument("--model", required=True, metavar="MODEL_JSON")
    p.add_argument("--test", required=True, metavar="NPZ")
    p.add_argument("--pairs", required=True, metavar="PAIRS_CSV")
    p.add_argument("--top-k", type=int, default=10)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_analyze, parser=p)

    p = sub.add_parser("report", help="render an evaluation report")
    p.add_argument("--report", required=True, metavar="REPORT_JSON")
    p.add_argument("--format", choices=FORMATS, default="text")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_report, parser=p)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CliError as exc:
        for line in exc.lines:
            print(line, file=sys.stderr)
        return 1
    except RhetrelError as exc:
        print(str(exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
