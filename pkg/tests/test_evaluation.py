import json
import math

import numpy as np
import pytest

from oracles import (
    slow_accuracy,
    slow_class_metrics,
    slow_confusion,
    slow_mean_cross_entropy,
    slow_weighted_f1,
)
from rhetrel.dataset import EncodedDataset, EncodedItem
from rhetrel.errors import (
    CodeOutOfRange,
    EmptyInput,
    EvalError,
    LengthMismatch,
    MalformedProbRow,
)
from rhetrel.evaluation import (
    accuracy,
    confusion_matrix,
    confusion_pairs,
    evaluate,
    mean_cross_entropy,
    rank_errors,
    report_from_json,
    report_to_json,
    weighted_f1,
)
from rhetrel.labels import DEFAULT_LABELS, LabelSet

LABELS8 = LabelSet(DEFAULT_LABELS)
LABELS3 = LabelSet(("A", "B", "C"))

Y_TRUE = [0, 0, 1, 2]
Y_PRED = [0, 1, 1, 2]


class TestFrozenExamples:
    def test_accuracy(self):
        assert accuracy(Y_TRUE, Y_PRED) == 0.75

    def test_confusion(self):
        assert confusion_matrix(Y_TRUE, Y_PRED, 3) == (
            (1, 1, 0),
            (0, 1, 0),
            (0, 0, 1),
        )

    def test_weighted_f1(self):
        # Classes 0 and 1 both score F1 = 2/3, class 2 scores 1, with
        # supports 2/1/1: (2*2/3 + 2/3 + 1) / 4 = 0.75.
        assert weighted_f1(Y_TRUE, Y_PRED, 3) == pytest.approx(0.75, abs=1e-12)

    def test_mean_cross_entropy(self):
        proba = [[0.5, 0.5], [0.25, 0.75]]
        want = (math.log(2) + math.log(4)) / 2
        assert mean_cross_entropy([0, 0], proba) == pytest.approx(
            1.0397207708399179, abs=1e-12
        )
        assert mean_cross_entropy([0, 0], proba) == pytest.approx(want, abs=1e-12)

    def test_uniform_probability_loss_is_ln_k(self):
        proba = np.full((10, 8), 0.125)
        y = list(range(8)) + [0, 1]
        assert mean_cross_entropy(y, proba) == pytest.approx(
            2.0794415416798357, abs=1e-9
        )

    def test_certain_probability_loss_is_zero(self):
        proba = np.eye(3)
        assert mean_cross_entropy([0, 1, 2], proba) == 0.0

    def test_probability_floor_keeps_loss_finite(self):
        proba = np.array([[0.0, 1.0]])
        loss = mean_cross_entropy([0], proba)
        assert loss == pytest.approx(-math.log(1e-12))


class TestZeroDivision:
    def test_never_predicted_class_scores_zero(self):
        report = evaluate([0, 1, 2], [0, 0, 0], LABELS3)
        m = {c.label: c for c in report.per_class}
        assert m["B"].precision == 0.0
        assert m["B"].recall == 0.0
        assert m["B"].f1 == 0.0
        assert m["A"].recall == 1.0
        assert report.weighted_f1 < 1.0

    def test_absent_class_scores_zero(self):
        report = evaluate([0, 0], [0, 0], LABELS3)
        m = {c.label: c for c in report.per_class}
        assert m["C"].support == 0
        assert m["C"].f1 == 0.0
        assert report.accuracy == 1.0


class TestValidation:
    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            accuracy([0, 1], [0])

    def test_empty_inputs(self):
        with pytest.raises(EmptyInput):
            accuracy([], [])

    def test_non_integer_codes(self):
        with pytest.raises(CodeOutOfRange):
            accuracy([0.5, 1], [0, 1])

    def test_out_of_range_codes(self):
        with pytest.raises(CodeOutOfRange):
            confusion_matrix([0, 8], [0, 0], 8)
        with pytest.raises(CodeOutOfRange):
            confusion_matrix([0, 0], [-1, 0], 8)

    def test_bad_probability_rows(self):
        with pytest.raises(MalformedProbRow):
            mean_cross_entropy([0], [[0.5, 0.6]])
        with pytest.raises(MalformedProbRow):
            mean_cross_entropy([0], [[-0.1, 1.1]])
        with pytest.raises(MalformedProbRow):
            mean_cross_entropy([0], [[float("nan"), 1.0]])
        with pytest.raises(MalformedProbRow):
            mean_cross_entropy([0], [[0.5, 0.5], [1.0]])

    def test_prob_row_count_mismatch(self):
        with pytest.raises(LengthMismatch):
            mean_cross_entropy([0, 1], [[0.5, 0.5]])

    def test_prob_width_must_match_class_count(self):
        with pytest.raises(MalformedProbRow):
            evaluate([0, 1], np.full((2, 4), 0.25), LABELS3)

    def test_malformed_row_message_names_row(self):
        with pytest.raises(MalformedProbRow) as exc:
            mean_cross_entropy([0, 0], [[1.0, 0.0], [0.9, 0.9]])
        assert "row 1" in str(exc.value)


class TestEvaluate:
    def test_hard_predictions_have_no_loss(self):
        report = evaluate(Y_TRUE, Y_PRED, LABELS3)
        assert report.mean_cross_entropy is None
        assert report.accuracy == 0.75
        assert report.n == 4

    def test_hard_predictions_as_array(self):
        report = evaluate(np.array(Y_TRUE), np.array(Y_PRED), LABELS3)
        assert report.mean_cross_entropy is None

    def test_probabilistic_predictions(self):
        proba = np.array(
            [
                [0.8, 0.1, 0.1],
                [0.2, 0.7, 0.1],
                [0.3, 0.4, 0.3],
            ]
        )
        report = evaluate([0, 1, 2], proba, LABELS3)
        assert report.accuracy == pytest.approx(2 / 3)
        assert report.mean_cross_entropy == pytest.approx(
            -(math.log(0.8) + math.log(0.7) + math.log(0.3)) / 3, abs=1e-12
        )

    def test_trace_over_n_is_accuracy(self):
        rng = np.random.default_rng(0)
        y_true = rng.integers(0, 8, 100)
        y_pred = rng.integers(0, 8, 100)
        report = evaluate(list(y_true), list(int(v) for v in y_pred), LABELS8)
        trace = sum(report.confusion[c][c] for c in range(8))
        assert report.accuracy == trace / report.n

    def test_permutation_invariance(self):
        rng = np.random.default_rng(1)
        y_true = list(rng.integers(0, 3, 30))
        proba = rng.dirichlet(np.ones(3), size=30)
        base = evaluate(y_true, proba, LABELS3)
        perm = rng.permutation(30)
        shuffled = evaluate(
            [y_true[i] for i in perm], proba[perm], LABELS3
        )
        assert shuffled.accuracy == pytest.approx(base.accuracy, abs=1e-12)
        assert shuffled.weighted_f1 == pytest.approx(base.weighted_f1, abs=1e-12)
        assert shuffled.mean_cross_entropy == pytest.approx(
            base.mean_cross_entropy, abs=1e-12
        )
        assert shuffled.confusion == base.confusion

    @pytest.mark.criterion("metrics match oracle")
    def test_matches_slow_oracle(self):
        rng = np.random.default_rng(2)
        for _ in range(30):
            n = int(rng.integers(2, 50))
            y_true = [int(v) for v in rng.integers(0, 8, n)]
            proba = rng.dirichlet(np.ones(8), size=n)
            y_pred = [int(np.argmax(row)) for row in proba]
            report = evaluate(y_true, proba, LABELS8)
            assert report.accuracy == pytest.approx(
                slow_accuracy(y_true, y_pred), abs=1e-12
            )
            assert [list(r) for r in report.confusion] == slow_confusion(
                y_true, y_pred, 8
            )
            assert report.weighted_f1 == pytest.approx(
                slow_weighted_f1(y_true, y_pred, 8), abs=1e-12
            )
            assert report.mean_cross_entropy == pytest.approx(
                slow_mean_cross_entropy(y_true, proba), abs=1e-12
            )
            for c, m in enumerate(report.per_class):
                precision, recall, f1, support = slow_class_metrics(
                    y_true, y_pred, c
                )
                assert m.precision == pytest.approx(precision, abs=1e-12)
                assert m.recall == pytest.approx(recall, abs=1e-12)
                assert m.f1 == pytest.approx(f1, abs=1e-12)
                assert m.support == support


def make_ds(y, texts=None):
    items = tuple(
        EncodedItem(i, f"left {i}" if texts is None else texts[i], f"right {i}", int(code))
        for i, code in enumerate(y)
    )
    return EncodedDataset(items, LABELS3)


class TestRankErrors:
    def test_ranked_by_loss_then_id(self):
        ds = make_ds([0, 1, 2, 1])
        proba = np.array(
            [
                [0.9, 0.05, 0.05],  # correct
                [0.98, 0.01, 0.01],  # wrong, loss ln(1/0.01)
                [0.1, 0.6, 0.3],  # wrong, loss ln(1/0.3)
                [0.45, 0.1, 0.45],  # wrong, loss ln(1/0.1)
            ]
        )
        ranked = rank_errors(ds, proba, 10)
        assert [r.id for r in ranked] == [1, 3, 2]
        assert ranked[0].loss == pytest.approx(-math.log(0.01))
        assert ranked[0].true_label == "B"
        assert ranked[0].predicted_label == "A"
        assert ranked[0].edu1 == "left 1"

    def test_equal_losses_order_by_id(self):
        ds = make_ds([0, 0, 0])
        proba = np.array(
            [
                [0.2, 0.8, 0.0],
                [0.2, 0.0, 0.8],
                [1.0, 0.0, 0.0],
            ]
        )
        ranked = rank_errors(ds, proba, 5)
        assert [r.id for r in ranked] == [0, 1]

    def test_truncation(self):
        ds = make_ds([0, 0, 0])
        proba = np.array(
            [[0.1, 0.9, 0.0], [0.2, 0.8, 0.0], [0.3, 0.7, 0.0]]
        )
        assert len(rank_errors(ds, proba, 2)) == 2
        assert rank_errors(ds, proba, 0) == ()

    def test_all_correct_is_empty(self):
        ds = make_ds([0, 1, 2])
        assert rank_errors(ds, np.eye(3), 10) == ()

    def test_validation(self):
        ds = make_ds([0, 1])
        with pytest.raises(LengthMismatch):
            rank_errors(ds, np.eye(3), 5)
        with pytest.raises(MalformedProbRow):
            rank_errors(ds, np.full((2, 4), 0.25), 5)


class TestConfusionPairs:
    def test_ordering(self):
        confusion = ((5, 2, 0), (1, 0, 3), (0, 0, 4))
        assert confusion_pairs(confusion, LABELS3) == (
            ("B", "C", 3),
            ("A", "B", 2),
            ("B", "A", 1),
        )

    def test_ties_break_by_position(self):
        confusion = ((0, 1, 0), (0, 0, 1), (1, 0, 0))
        assert confusion_pairs(confusion, LABELS3) == (
            ("A", "B", 1),
            ("B", "C", 1),
            ("C", "A", 1),
        )

    def test_diagonal_only_is_empty(self):
        assert confusion_pairs(((3, 0), (0, 2)), LabelSet(("A", "B"))) == ()

    def test_matches_brute_force_sort(self):
        rng = np.random.default_rng(3)
        confusion = tuple(
            tuple(int(v) for v in row) for row in rng.integers(0, 9, (8, 8))
        )
        got = confusion_pairs(confusion, LABELS8)
        cells = [
            (-confusion[r][c], r, c)
            for r in range(8)
            for c in range(8)
            if r != c and confusion[r][c] > 0
        ]
        want = tuple(
            (LABELS8.name(r), LABELS8.name(c), -neg)
            for neg, r, c in sorted(cells)
        )
        assert got == want


class TestReportJson:
    def test_round_trip(self):
        rng = np.random.default_rng(4)
        y_true = list(int(v) for v in rng.integers(0, 8, 40))
        proba = rng.dirichlet(np.ones(8), size=40)
        report = evaluate(y_true, proba, LABELS8)
        assert report_from_json(report_to_json(report)) == report

    def test_round_trip_without_loss(self):
        report = evaluate(Y_TRUE, Y_PRED, LABELS3)
        loaded = report_from_json(report_to_json(report))
        assert loaded == report
        assert loaded.mean_cross_entropy is None

    def test_malformed(self):
        with pytest.raises(EvalError):
            report_from_json("{}")
        with pytest.raises(EvalError):
            report_from_json(json.dumps({"n": "x"}))
