"""Acceptance gate: one test per contract-level guarantee.

Each test carries a ``criterion`` marker; the terminal summary prints
one PASS/FAIL line per criterion.  Tolerances and time budgets are
asserted inside the tests themselves.
"""

import csv
import io
import json
import random
import subprocess
import sys
import time
from collections import Counter
from xml.etree import ElementTree as ET

import numpy as np
import pytest

from oracles import (
    slow_accuracy,
    slow_class_metrics,
    slow_confusion,
    slow_mean_cross_entropy,
    slow_weighted_f1,
)
from rhetrel.cli import main
from rhetrel.corpus import parse_pair_csv, parse_standoff, write_pair_csv, LabeledPair
from rhetrel.errors import (
    BadOffset,
    CorpusError,
    DanglingRelation,
    DuplicateSpanId,
    StandoffSyntaxError,
    UnknownLabel,
)
from rhetrel.evaluation import evaluate, mean_cross_entropy
from rhetrel.features import DesignMatrix, FeatureConfig
from rhetrel.labels import DEFAULT_LABELS, LabelSet
from rhetrel.softmax import (
    Hyperparams,
    SoftmaxModel,
    fit,
    loss_and_gradient,
    predict,
)
from rhetrel.toy import toy_corpus_paths

LABELS8 = LabelSet(DEFAULT_LABELS)


def run_cli(*argv):
    return main([str(a) for a in argv])


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))[1:]


@pytest.fixture(scope="module")
def toy_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("toy")
    assert run_cli("ingest", *toy_corpus_paths(), "--out-dir", root) == 0
    assert (
        run_cli(
            "balance",
            "--input", root / "pairs.csv",
            "--target", 25,
            "--seed", 7,
            "--out-dir", root,
        )
        == 0
    )
    return root


@pytest.mark.criterion("metrics match oracle")
def test_metrics_agree_with_slow_oracle_on_random_instances():
    rng = np.random.default_rng(101)
    start = time.monotonic()
    for _ in range(100):
        n, k = 100, 8
        y_true = [int(v) for v in rng.integers(0, k, n)]
        proba = rng.dirichlet(np.ones(k), size=n)
        y_pred = [int(np.argmax(row)) for row in proba]
        report = evaluate(y_true, proba, LABELS8)
        assert abs(report.accuracy - slow_accuracy(y_true, y_pred)) <= 1e-12
        assert [list(r) for r in report.confusion] == slow_confusion(
            y_true, y_pred, k
        )
        assert (
            abs(report.weighted_f1 - slow_weighted_f1(y_true, y_pred, k))
            <= 1e-12
        )
        assert (
            abs(
                report.mean_cross_entropy
                - slow_mean_cross_entropy(y_true, proba)
            )
            <= 1e-12
        )
        for c, m in enumerate(report.per_class):
            precision, recall, f1, support = slow_class_metrics(y_true, y_pred, c)
            assert abs(m.precision - precision) <= 1e-12
            assert abs(m.recall - recall) <= 1e-12
            assert abs(m.f1 - f1) <= 1e-12
            assert m.support == support
    assert time.monotonic() - start < 5.0


@pytest.mark.criterion("gradient matches finite differences")
def test_analytic_gradient_matches_central_differences():
    rng = np.random.default_rng(202)
    h = 1e-5
    start = time.monotonic()
    for _ in range(50):
        n = int(rng.integers(1, 11))
        d = int(rng.integers(1, 9))
        k = int(rng.integers(2, 9))
        X = rng.standard_normal((n, d))
        y = rng.integers(0, k, n)
        W = rng.standard_normal((k, d)) * 0.5
        b = rng.standard_normal(k) * 0.5
        l2 = float(rng.uniform(0.0, 2.0))
        labels = LabelSet(tuple(f"L{i}" for i in range(k)))
        config = FeatureConfig(dims=d)

        def model_at(Wp, bp):
            return SoftmaxModel(
                W=Wp,
                b=bp,
                label_set=labels,
                feature_config=config,
                trained_hyper=Hyperparams(),
            )

        dm = DesignMatrix(
            X=X,
            y=np.asarray(y, dtype=np.int64),
            ids=np.arange(n, dtype=np.int64),
            feature_config=config,
        )
        _, gW, gb = loss_and_gradient(model_at(W, b), dm, l2)
        for r in range(k):
            for c in range(d):
                Wp, Wm = W.copy(), W.copy()
                Wp[r, c] += h
                Wm[r, c] -= h
                lp = loss_and_gradient(model_at(Wp, b), dm, l2)[0]
                lm = loss_and_gradient(model_at(Wm, b), dm, l2)[0]
                numeric = (lp - lm) / (2 * h)
                denom = max(1.0, abs(numeric), abs(gW[r, c]))
                assert abs(numeric - gW[r, c]) / denom <= 1e-6
        for r in range(k):
            bp, bm = b.copy(), b.copy()
            bp[r] += h
            bm[r] -= h
            lp = loss_and_gradient(model_at(W, bp), dm, l2)[0]
            lm = loss_and_gradient(model_at(W, bm), dm, l2)[0]
            numeric = (lp - lm) / (2 * h)
            denom = max(1.0, abs(numeric), abs(gb[r]))
            assert abs(numeric - gb[r]) / denom <= 1e-6
    assert time.monotonic() - start < 10.0


@pytest.mark.criterion("optimizer fits separable data")
def test_default_settings_fit_separable_eight_classes():
    rng = np.random.default_rng(303)
    n_per, k, d = 25, 8, 16
    X = rng.normal(0.0, 0.3, size=(n_per * k, d))
    y = np.repeat(np.arange(k), n_per)
    for c in range(k):
        rows = slice(c * n_per, (c + 1) * n_per)
        X[rows, 2 * c] += 3.0
        X[rows, 2 * c + 1] += 3.0
    dm = DesignMatrix(
        X=X,
        y=y.astype(np.int64),
        ids=np.arange(len(y), dtype=np.int64),
        feature_config=FeatureConfig(dims=d),
    )
    start = time.monotonic()
    result = fit(dm, Hyperparams())
    elapsed = time.monotonic() - start
    accuracy = float((predict(result.model, X) == y).mean())
    assert accuracy >= 0.99
    assert result.iterations <= 3000
    diffs = np.diff(result.losses)
    assert (diffs <= 0).all()
    assert elapsed < 30.0


@pytest.mark.criterion("zero model loss is ln K")
def test_zero_model_mean_cross_entropy_is_ln_8():
    rng = np.random.default_rng(404)
    dm = DesignMatrix(
        X=rng.standard_normal((64, 12)),
        y=rng.integers(0, 8, 64).astype(np.int64),
        ids=np.arange(64, dtype=np.int64),
        feature_config=FeatureConfig(dims=12),
    )
    result = fit(dm, Hyperparams(max_iter=1))
    assert abs(result.losses[0] - np.log(8)) <= 1e-9
    uniform = np.full((64, 8), 0.125)
    ce = mean_cross_entropy([int(v) for v in dm.y], uniform)
    assert abs(ce - np.log(8)) <= 1e-9


@pytest.mark.criterion("oversampling balances")
def test_balance_target_25_on_toy_corpus(toy_dir, tmp_path):
    hist = json.loads((toy_dir / "balanced_histogram.json").read_text())
    assert hist == {name: 25 for name in DEFAULT_LABELS}
    before = Counter(tuple(row) for row in read_rows(toy_dir / "pairs.csv"))
    after = Counter(tuple(row) for row in read_rows(toy_dir / "balanced.csv"))
    assert sum(after.values()) == 200
    assert set(after) == set(before)
    assert all(after[key] >= n for key, n in before.items())
    # Rerun with the same inputs and seed: byte-identical artifacts.
    assert (
        run_cli(
            "balance",
            "--input", toy_dir / "pairs.csv",
            "--target", 25,
            "--seed", 7,
            "--out-dir", tmp_path,
        )
        == 0
    )
    for name in ("balanced.csv", "balanced_histogram.json"):
        assert (tmp_path / name).read_bytes() == (toy_dir / name).read_bytes()


@pytest.mark.criterion("split is stratified")
def test_split_ratios_on_200_balanced_pairs(toy_dir, tmp_path):
    assert (
        run_cli(
            "split",
            "--input", toy_dir / "balanced.csv",
            "--ratios", "0.6,0.2,0.2",
            "--seed", 11,
            "--out-dir", tmp_path,
        )
        == 0
    )
    parts = {
        name: read_rows(tmp_path / f"{name}.csv")
        for name in ("train", "validation", "test")
    }
    assert {name: len(rows) for name, rows in parts.items()} == {
        "train": 120,
        "validation": 40,
        "test": 40,
    }
    for name, want in (("train", 15), ("validation", 5), ("test", 5)):
        per_class = Counter(row[2] for row in parts[name])
        assert per_class == {label: want for label in DEFAULT_LABELS}
    # Disjoint and exhaustive as multisets of rows.
    combined = Counter()
    for rows in parts.values():
        combined.update(tuple(row) for row in rows)
    source = Counter(tuple(row) for row in read_rows(toy_dir / "balanced.csv"))
    assert combined == source


@pytest.mark.criterion("format round-trips")
def test_thousand_pair_write_parse_identity():
    rng = random.Random(505)
    alphabet = (
        "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"
        ' ,"\n\r\'éßあ-;:'
    )
    pairs = []
    for i in range(1000):
        fields = []
        while len(fields) < 2:
            text = "".join(
                rng.choice(alphabet) for _ in range(rng.randint(1, 60))
            )
            if text.strip():
                fields.append(text)
        pairs.append(
            LabeledPair(fields[0], fields[1], DEFAULT_LABELS[i % 8])
        )
    assert parse_pair_csv(write_pair_csv(pairs)) == pairs


@pytest.mark.criterion("format round-trips")
def test_malformed_standoff_fixtures_raise_named_diagnostics():
    fixtures = [
        ("#DOC d\n#TEXT short.\nSPAN s1 0 99\n", BadOffset, 3),
        (
            "#DOC d\n#TEXT abc def\nSPAN s1 0 3\nREL s1 s9 Contrast\n",
            DanglingRelation,
            4,
        ),
        (
            "#DOC d\n#TEXT abc def\nSPAN s1 0 3\nSPAN s1 4 7\n",
            DuplicateSpanId,
            4,
        ),
        (
            "#DOC d\n#TEXT abc def\nSPAN s1 0 3\nSPAN s2 4 7\nREL s1 s2 Evidence\n",
            UnknownLabel,
            5,
        ),
        ("#DOC d\n#TEXT abc\nSPAM s1 0 3\n", StandoffSyntaxError, 3),
    ]
    for content, exc_type, line_no in fixtures:
        with pytest.raises(exc_type) as exc:
            parse_standoff(content)
        assert f"line {line_no}" in str(exc.value)


@pytest.mark.criterion("format round-trips")
def test_sixty_second_parser_fuzz():
    rng = random.Random(606)
    with open(toy_corpus_paths()[0], encoding="utf-8") as fh:
        seed_doc = fh.read()
    seed_csv = "EDU1,EDU2,Label\na b c,d e f,Contrast\nx,y,Joint\n"
    pool = "abc \t\n\r\",#LRSEPANTDOC0123456789éあ\x00"

    def random_text():
        return "".join(
            rng.choice(pool) for _ in range(rng.randint(0, 400))
        )

    def mutated(source):
        chars = list(source)
        for _ in range(rng.randint(1, 12)):
            op = rng.randrange(3)
            pos = rng.randrange(len(chars) + 1) if chars else 0
            if op == 0 and chars:
                del chars[min(pos, len(chars) - 1)]
            elif op == 1:
                chars.insert(pos, rng.choice(pool))
            elif chars:
                chars[min(pos, len(chars) - 1)] = rng.choice(pool)
        return "".join(chars)

    start = time.monotonic()
    iterations = 0
    while time.monotonic() - start < 60.0:
        choice = rng.randrange(4)
        if choice == 0:
            content = random_text()
        elif choice == 1:
            content = mutated(seed_doc)
        elif choice == 2:
            content = mutated(seed_csv)
        else:
            content = mutated(seed_doc) + "\n" + random_text()
        for parser in (parse_pair_csv, parse_standoff):
            try:
                parser(content)
            except CorpusError:
                pass
        iterations += 1
    assert iterations > 100


@pytest.mark.criterion("pipeline smoke")
def test_end_to_end_cli_smoke(tmp_path):
    out = tmp_path / "run"

    def cli(*argv):
        proc = subprocess.run(
            [sys.executable, "-m", "rhetrel", *map(str, argv)],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        return proc

    start = time.monotonic()
    cli("ingest", *toy_corpus_paths(), "--out-dir", out)
    cli(
        "balance",
        "--input", out / "pairs.csv",
        "--target", 25,
        "--seed", 7,
        "--out-dir", out,
    )
    cli("split", "--input", out / "balanced.csv", "--seed", 11, "--out-dir", out)
    cli(
        "featurize",
        "--input", out / "train.csv",
        "--output", "train_features.npz",
        "--out-dir", out,
    )
    cli(
        "featurize",
        "--input", out / "test.csv",
        "--output", "test_features.npz",
        "--out-dir", out,
    )
    cli("train", "--features", out / "train_features.npz", "--out-dir", out)
    cli(
        "evaluate",
        "--model", out / "model.json",
        "--test", out / "test_features.npz",
        "--out-dir", out,
    )
    cli(
        "analyze",
        "--model", out / "model.json",
        "--test", out / "test_features.npz",
        "--pairs", out / "test.csv",
        "--top-k", 10,
        "--out-dir", out,
    )
    for fmt in ("text", "csv", "svg"):
        cli("report", "--report", out / "report.json", "--format", fmt, "--out-dir", out)
    elapsed = time.monotonic() - start

    for name in (
        "ingest.manifest.json",
        "balance.manifest.json",
        "split.manifest.json",
        "train_features.manifest.json",
        "test_features.manifest.json",
        "train.manifest.json",
        "evaluate.manifest.json",
        "analyze.manifest.json",
        "report.manifest.json",
    ):
        manifest = json.loads((out / name).read_text())
        assert manifest["version"]
        assert manifest["outputs"]

    report = json.loads((out / "report.json").read_text())
    assert report["n"] == 40
    assert 0.0 <= report["accuracy"] <= 1.0
    assert report["mean_cross_entropy"] is not None

    with open(out / "confusion.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0][1:] == list(DEFAULT_LABELS)
    counts = [[int(v) for v in row[1:]] for row in rows[1:]]
    assert counts == report["confusion"]

    svg_root = ET.fromstring((out / "confusion.svg").read_bytes())
    assert svg_root.tag.endswith("svg")
    cells = [
        el
        for el in svg_root.iter("{http://www.w3.org/2000/svg}rect")
        if el.get("class") == "cell"
    ]
    assert len(cells) == 64

    errors = json.loads((out / "errors.json").read_text())
    assert isinstance(errors, list)

    assert elapsed < 60.0
