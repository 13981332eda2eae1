#!/usr/bin/env python3
"""Run the full pipeline on the bundled toy corpus and print the scores.

Steps: ingest -> balance -> split -> featurize -> train -> evaluate ->
analyze -> report.  Every artifact lands in --out-dir, reruns with the
same seeds are byte-identical (manifests aside).
"""

import argparse
import json
import os
import sys

from rhetrel.cli import main as cli
from rhetrel.toy import toy_corpus_paths


def run(*argv):
    argv = [str(a) for a in argv]
    code = cli(argv)
    if code != 0:
        print(f"step failed ({code}): {' '.join(argv)}", file=sys.stderr)
        sys.exit(code)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="runs/toy")
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--dims", type=int, default=2048)
    ap.add_argument("--max-iter", type=int, default=3000)
    args = ap.parse_args()

    out = args.out_dir
    os.makedirs(out, exist_ok=True)
    join = lambda name: os.path.join(out, name)

    run("ingest", *toy_corpus_paths(), "--out-dir", out)
    run(
        "balance",
        "--input", join("pairs.csv"),
        "--target", 25,
        "--seed", args.seed,
        "--out-dir", out,
    )
    run(
        "split",
        "--input", join("balanced.csv"),
        "--seed", args.seed,
        "--balance-policy", "before-split",
        "--out-dir", out,
    )
    for part in ("train", "validation", "test"):
        run(
            "featurize",
            "--input", join(f"{part}.csv"),
            "--dims", args.dims,
            "--output", f"{part}_features.npz",
            "--out-dir", out,
        )
    run(
        "train",
        "--features", join("train_features.npz"),
        "--max-iter", args.max_iter,
        "--out-dir", out,
    )
    run(
        "evaluate",
        "--model", join("model.json"),
        "--test", join("test_features.npz"),
        "--out-dir", out,
    )
    run(
        "analyze",
        "--model", join("model.json"),
        "--test", join("test_features.npz"),
        "--pairs", join("test.csv"),
        "--top-k", 10,
        "--out-dir", out,
    )
    for fmt in ("text", "csv", "svg"):
        run("report", "--report", join("report.json"), "--format", fmt, "--out-dir", out)

    report = json.load(open(join("report.json")))
    model = json.load(open(join("model.json")))
    errors = json.load(open(join("errors.json")))
    print(f"artifacts in {out}/")
    print(
        f"test n={report['n']}  accuracy={report['accuracy']:.4f}  "
        f"weighted_f1={report['weighted_f1']:.4f}  "
        f"mean_cross_entropy={report['mean_cross_entropy']:.4f}"
    )
    print(
        f"train iterations={model['iterations']}  "
        f"final_loss={model['final_loss']:.4f}  converged={model['converged']}"
    )
    print(f"top misclassifications recorded: {len(errors)}")


if __name__ == "__main__":
    main()
