"""Classification metrics and error analysis for relation predictions.

Metrics follow the usual multiclass conventions: precision, recall, and
F1 come from the confusion matrix with a zero fallback whenever a
denominator vanishes, and weighted F1 averages per-class F1 by
true-class support.  Cross-entropy is the mean of -ln p(true class)
with the picked probability clamped below at 1e-12, so a confidently
wrong prediction yields a large but finite loss.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from rhetrel.dataset import EncodedDataset
from rhetrel.errors import (
    CodeOutOfRange,
    EmptyInput,
    EvalError,
    LengthMismatch,
    MalformedProbRow,
)
from rhetrel.labels import LabelSet

# Floor applied to the true-class probability before taking the log.
_PROB_FLOOR = 1e-12
# Each probability row must sum to 1 within this tolerance.
_ROW_SUM_TOL = 1e-6
# Slack above 1.0 tolerated for individual components (float round-off).
_COMPONENT_TOL = 1e-9


@dataclass(frozen=True)
class ClassMetrics:
    """Precision, recall, and F1 for one relation label."""

    label: str
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class ErrorRecord:
    """One misclassified pair, ranked by its cross-entropy loss."""

    id: int
    true_label: str
    predicted_label: str
    loss: float
    edu1: str
    edu2: str


@dataclass(frozen=True)
class EvalReport:
    """Evaluation summary for one prediction set.

    ``confusion`` has true labels on rows and predictions on columns,
    both in label-set order.  ``mean_cross_entropy`` is None when only
    hard predictions were available.
    """

    n: int
    accuracy: float
    per_class: tuple[ClassMetrics, ...]
    weighted_f1: float
    mean_cross_entropy: float | None
    confusion: tuple[tuple[int, ...], ...]


def _codes(values: Sequence[int], name: str) -> list[int]:
    out = []
    for value in values:
        code = int(value)
        if code != value:
            raise CodeOutOfRange(f"{name} contains non-integer code {value!r}")
        out.append(code)
    if not out:
        raise EmptyInput(f"{name} is empty")
    return out


def _paired_codes(
    y_true: Sequence[int], y_pred: Sequence[int]
) -> tuple[list[int], list[int]]:
    if len(y_true) != len(y_pred):
        raise LengthMismatch(
            f"y_true has {len(y_true)} items, y_pred has {len(y_pred)}"
        )
    return _codes(y_true, "y_true"), _codes(y_pred, "y_pred")


def _check_range(codes: Sequence[int], k: int, name: str) -> None:
    for code in codes:
        if not 0 <= code < k:
            raise CodeOutOfRange(f"{name} code {code} outside 0..{k - 1}")


def accuracy(y_true: Sequence[int], y_pred: Sequence[int]) -> float:
    """Fraction of items whose predicted code equals the true code."""
    true_codes, pred_codes = _paired_codes(y_true, y_pred)
    matches = sum(1 for t, p in zip(true_codes, pred_codes) if t == p)
    return matches / len(true_codes)


def confusion_matrix(
    y_true: Sequence[int], y_pred: Sequence[int], k: int
) -> tuple[tuple[int, ...], ...]:
    """K x K count matrix; cell (t, p) counts items with true t, predicted p."""
    true_codes, pred_codes = _paired_codes(y_true, y_pred)
    _check_range(true_codes, k, "y_true")
    _check_range(pred_codes, k, "y_pred")
    cells = [[0] * k for _ in range(k)]
    for t, p in zip(true_codes, pred_codes):
        cells[t][p] += 1
    return tuple(tuple(row) for row in cells)


def _class_scores(
    confusion: Sequence[Sequence[int]],
) -> list[tuple[float, float, float, int]]:
    # Per class: tp on the diagonal, fp down the column, fn along the row.
    k = len(confusion)
    scores = []
    for c in range(k):
        tp = confusion[c][c]
        fp = sum(confusion[r][c] for r in range(k)) - tp
        fn = sum(confusion[c]) - tp
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        denom = precision + recall
        f1 = 2.0 * precision * recall / denom if denom else 0.0
        scores.append((precision, recall, f1, tp + fn))
    return scores


def weighted_f1(y_true: Sequence[int], y_pred: Sequence[int], k: int) -> float:
    """Mean of per-class F1 scores weighted by true-class support."""
    confusion = confusion_matrix(y_true, y_pred, k)
    n = sum(sum(row) for row in confusion)
    scores = _class_scores(confusion)
    return sum(support * f1 for _, _, f1, support in scores) / n


def _prob_matrix(proba) -> np.ndarray:
    try:
        arr = np.asarray(proba, dtype=np.float64)
    except (TypeError, ValueError):
        raise MalformedProbRow(
            "probability rows must be numeric and rectangular"
        ) from None
    if arr.ndim != 2:
        raise MalformedProbRow(
            f"expected a 2-d probability array, got {arr.ndim} dimensions"
        )
    if arr.shape[1] == 0:
        raise MalformedProbRow("probability rows are empty")
    bad = ~np.isfinite(arr)
    if bad.any():
        row = int(np.argmax(bad.any(axis=1)))
        raise MalformedProbRow(f"row {row}: non-finite probability")
    outside = (arr < 0.0) | (arr > 1.0 + _COMPONENT_TOL)
    if outside.any():
        row = int(np.argmax(outside.any(axis=1)))
        raise MalformedProbRow(f"row {row}: probability outside [0, 1]")
    sums = arr.sum(axis=1)
    off = np.abs(sums - 1.0) > _ROW_SUM_TOL
    if off.any():
        row = int(np.argmax(off))
        raise MalformedProbRow(
            f"row {row}: probabilities sum to {sums[row]:.6f}, not 1"
        )
    return arr


def mean_cross_entropy(y_true: Sequence[int], proba) -> float:
    """Mean of -ln p(true class) over all items."""
    arr = _prob_matrix(proba)
    if len(y_true) != arr.shape[0]:
        raise LengthMismatch(
            f"y_true has {len(y_true)} items, proba has {arr.shape[0]} rows"
        )
    true_codes = _codes(y_true, "y_true")
    _check_range(true_codes, arr.shape[1], "y_true")
    picked = arr[np.arange(len(true_codes)), true_codes]
    return float(-np.log(np.maximum(picked, _PROB_FLOOR)).mean())


def _maybe_prob_matrix(values) -> np.ndarray | None:
    # Hard predictions are integer codes; anything row-shaped is treated
    # as a probability matrix and validated as such.
    if isinstance(values, np.ndarray):
        return _prob_matrix(values) if values.ndim != 1 else None
    seq = list(values)
    if seq and not isinstance(seq[0], (int, np.integer)):
        return _prob_matrix(seq)
    return None


def evaluate(
    y_true: Sequence[int], proba_or_pred, label_set: LabelSet
) -> EvalReport:
    """Assemble accuracy, per-class scores, weighted F1, loss, and confusion.

    ``proba_or_pred`` is either a sequence of integer class codes (hard
    predictions; the report then carries no cross-entropy) or a 2-d
    array of per-class probabilities, one row per item.
    """
    k = len(label_set)
    proba = _maybe_prob_matrix(proba_or_pred)
    if proba is not None:
        if proba.shape[1] != k:
            raise MalformedProbRow(
                f"probability rows have width {proba.shape[1]}, expected {k}"
            )
        if len(y_true) != proba.shape[0]:
            raise LengthMismatch(
                f"y_true has {len(y_true)} items, proba has {proba.shape[0]} rows"
            )
        y_pred = [int(c) for c in np.argmax(proba, axis=1)]
        ce = mean_cross_entropy(y_true, proba)
    else:
        y_pred = list(proba_or_pred)
        ce = None
    true_codes, pred_codes = _paired_codes(y_true, y_pred)
    _check_range(true_codes, k, "y_true")
    _check_range(pred_codes, k, "y_pred")
    confusion = confusion_matrix(true_codes, pred_codes, k)
    scores = _class_scores(confusion)
    per_class = tuple(
        ClassMetrics(label_set.name(c), precision, recall, f1, support)
        for c, (precision, recall, f1, support) in enumerate(scores)
    )
    n = len(true_codes)
    matches = sum(confusion[c][c] for c in range(k))
    return EvalReport(
        n=n,
        accuracy=matches / n,
        per_class=per_class,
        weighted_f1=sum(m.support * m.f1 for m in per_class) / n,
        mean_cross_entropy=ce,
        confusion=confusion,
    )


def rank_errors(
    ds: EncodedDataset, proba, k: int
) -> tuple[ErrorRecord, ...]:
    """Misclassified items ranked by loss, worst first, truncated to k."""
    arr = _prob_matrix(proba)
    if len(ds.items) != arr.shape[0]:
        raise LengthMismatch(
            f"dataset has {len(ds.items)} items, proba has {arr.shape[0]} rows"
        )
    if arr.shape[1] != len(ds.label_set):
        raise MalformedProbRow(
            f"probability rows have width {arr.shape[1]}, "
            f"expected {len(ds.label_set)}"
        )
    records = []
    for item, row in zip(ds.items, arr):
        pred = int(np.argmax(row))
        if pred == item.y:
            continue
        loss = -math.log(max(float(row[item.y]), _PROB_FLOOR))
        records.append(
            ErrorRecord(
                id=item.id,
                true_label=ds.label_set.name(item.y),
                predicted_label=ds.label_set.name(pred),
                loss=loss,
                edu1=item.edu1,
                edu2=item.edu2,
            )
        )
    records.sort(key=lambda r: (-r.loss, r.id))
    return tuple(records[: max(k, 0)])


def confusion_pairs(
    confusion: Sequence[Sequence[int]], label_set: LabelSet
) -> tuple[tuple[str, str, int], ...]:
    """Off-diagonal confusion cells, most frequent first, ties by position."""
    cells = []
    for r, row in enumerate(confusion):
        for c, count in enumerate(row):
            if r != c and count > 0:
                cells.append((r, c, int(count)))
    cells.sort(key=lambda cell: (-cell[2], cell[0], cell[1]))
    return tuple(
        (label_set.name(r), label_set.name(c), count) for r, c, count in cells
    )


def report_to_json(report: EvalReport) -> str:
    """Serialize a report to JSON; floats keep full repr precision."""
    payload = {
        "n": report.n,
        "accuracy": report.accuracy,
        "per_class": [
            {
                "label": m.label,
                "precision": m.precision,
                "recall": m.recall,
                "f1": m.f1,
                "support": m.support,
            }
            for m in report.per_class
        ],
        "weighted_f1": report.weighted_f1,
        "mean_cross_entropy": report.mean_cross_entropy,
        "confusion": [list(row) for row in report.confusion],
    }
    return json.dumps(payload, indent=2) + "\n"


def report_from_json(content: str) -> EvalReport:
    """Rebuild a report from its JSON form."""
    try:
        payload = json.loads(content)
        per_class = tuple(
            ClassMetrics(
                label=str(row["label"]),
                precision=float(row["precision"]),
                recall=float(row["recall"]),
                f1=float(row["f1"]),
                support=int(row["support"]),
            )
            for row in payload["per_class"]
        )
        ce = payload["mean_cross_entropy"]
        report = EvalReport(
            n=int(payload["n"]),
            accuracy=float(payload["accuracy"]),
            per_class=per_class,
            weighted_f1=float(payload["weighted_f1"]),
            mean_cross_entropy=None if ce is None else float(ce),
            confusion=tuple(
                tuple(int(v) for v in row) for row in payload["confusion"]
            ),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise EvalError(f"malformed report file: {exc}") from None
    return report
