"""Frozen-encoder baseline on the bundled toy corpus.

Drives both command-line tools end to end: ingest and balance the toy
corpus, split it, embed the train and test splits with one shared frozen
encoder, then train and score the softmax-regression baseline on those
embeddings. Compare with scripts/run_toy_pipeline.py in the main
package, which runs the same pipeline on hashed n-gram features.
"""

import argparse
import json
import subprocess
import sys


def run(*argv, cwd):
    proc = subprocess.run([sys.executable, "-m", *argv], cwd=cwd)
    if proc.returncode != 0:
        sys.exit(proc.returncode)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out-dir", default="runs/frozen")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--layers", type=int, default=2,
                        help="stand-in depth when no pretrained weights exist")
    parser.add_argument("--encoder", default="bert-base",
                        choices=("bert-base", "distilbert-base"))
    args = parser.parse_args()

    out = args.out_dir
    import os

    os.makedirs(out, exist_ok=True)
    toy = subprocess.run(
        [
            sys.executable,
            "-c",
            "from rhetrel.toy import toy_corpus_paths;"
            "print('\\n'.join(toy_corpus_paths()))",
        ],
        capture_output=True,
        text=True,
        check=True,
    ).stdout.split()

    run("rhetrel", "ingest", *toy, "--out-dir", ".", cwd=out)
    run("rhetrel", "balance", "--input", "pairs.csv", "--target", "25",
        "--seed", str(args.seed), "--out-dir", ".", cwd=out)
    run("rhetrel", "split", "--input", "balanced.csv",
        "--seed", str(args.seed), "--balance-policy", "before-split",
        "--out-dir", ".", cwd=out)

    for part in ("train", "test"):
        run(
            "rhetembed", "extract",
            "--input", f"{part}.csv", "--output", f"{part}_emb.jsonl",
            "--encoder", args.encoder, "--seed", str(args.seed),
            "--layers", str(args.layers), "--vocab-corpus", "balanced.csv",
            cwd=out,
        )
        run(
            "rhetrel", "featurize",
            "--input", f"{part}.csv", "--mode", "embedding",
            "--embeddings", f"{part}_emb.jsonl",
            "--output", f"{part}_features.npz", "--out-dir", ".",
            cwd=out,
        )

    run("rhetrel", "train", "--features", "train_features.npz",
        "--seed", str(args.seed), "--out-dir", ".", cwd=out)
    run("rhetrel", "evaluate", "--model", "model.json",
        "--test", "test_features.npz", "--out-dir", ".", cwd=out)
    run("rhetrel", "report", "--report", "report.json", "--format", "text",
        "--out-dir", ".", cwd=out)

    with open(f"{out}/report.json", encoding="utf-8") as fh:
        report = json.load(fh)
    print(f"artifacts in {out}/")
    print(
        "test n={n}  accuracy={accuracy:.4f}  weighted_f1={weighted_f1:.4f}".format(
            **report
        )
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
