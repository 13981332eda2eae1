import csv
import io
from xml.etree import ElementTree as ET

import numpy as np
import pytest

from rhetrel.errors import UnsupportedFormat
from rhetrel.evaluation import evaluate
from rhetrel.labels import DEFAULT_LABELS, LabelSet
from rhetrel.render import FORMATS, render_report

LABELS3 = LabelSet(("A", "B", "C"))
SVG_NS = "{http://www.w3.org/2000/svg}"


def small_report():
    return evaluate([0, 0, 1, 2], [0, 1, 1, 2], LABELS3)


def full_report():
    rng = np.random.default_rng(0)
    y_true = [int(v) for v in rng.integers(0, 8, 120)]
    proba = rng.dirichlet(np.ones(8), size=120)
    return evaluate(y_true, proba, LabelSet(DEFAULT_LABELS))


class TestText:
    def test_summary_line(self):
        text = render_report(small_report(), "text").decode()
        first = text.splitlines()[0]
        assert first == (
            "n=4  accuracy=0.7500  weighted_f1=0.7500  mean_cross_entropy=-"
        )

    def test_loss_printed_when_available(self):
        text = render_report(full_report(), "text").decode()
        assert "mean_cross_entropy=-" not in text
        assert "mean_cross_entropy=" in text

    def test_contains_all_labels_twice(self):
        # Once in the per-class table, once as a confusion row label.
        text = render_report(full_report(), "text").decode()
        for label in DEFAULT_LABELS:
            assert text.count(label) >= 2

    def test_confusion_grid_columns_align(self):
        text = render_report(full_report(), "text").decode()
        lines = text.splitlines()
        grid = lines[lines.index("confusion (rows = true, columns = predicted)") + 1 :]
        assert len(grid) == 9
        assert all(len(line) == len(grid[0]) for line in grid[1:])


class TestCsv:
    def test_round_trips_to_confusion_counts(self):
        report = full_report()
        raw = render_report(report, "csv").decode()
        rows = list(csv.reader(io.StringIO(raw)))
        assert rows[0] == ["", *DEFAULT_LABELS]
        assert len(rows) == 9
        for r, row in enumerate(rows[1:]):
            assert row[0] == DEFAULT_LABELS[r]
            assert [int(v) for v in row[1:]] == list(report.confusion[r])

    def test_lf_line_endings(self):
        raw = render_report(small_report(), "csv")
        assert b"\r" not in raw


class TestSvg:
    def test_well_formed_with_one_rect_per_cell(self):
        raw = render_report(full_report(), "svg")
        root = ET.fromstring(raw)
        assert root.tag == f"{SVG_NS}svg"
        rects = root.findall(f"{SVG_NS}rect")
        assert len(rects) == 64
        assert all(rect.get("class") == "cell" for rect in rects)

    def test_counts_drawn_in_cells(self):
        report = small_report()
        root = ET.fromstring(render_report(report, "svg"))
        texts = [t.text for t in root.findall(f"{SVG_NS}text")]
        for row in report.confusion:
            for count in row:
                assert str(count) in texts

    def test_has_title_and_viewbox(self):
        root = ET.fromstring(render_report(small_report(), "svg"))
        assert root.get("viewBox")
        title = root.find(f"{SVG_NS}title")
        assert title is not None and "confusion" in title.text

    def test_zero_and_peak_cells_get_distinct_shades(self):
        root = ET.fromstring(render_report(small_report(), "svg"))
        fills = {rect.get("fill") for rect in root.findall(f"{SVG_NS}rect")}
        assert "rgb(255,255,255)" in fills
        assert "rgb(31,78,121)" in fills


class TestDispatch:
    def test_formats_tuple(self):
        assert FORMATS == ("text", "csv", "svg")

    def test_every_format_renders_bytes(self):
        report = full_report()
        for fmt in FORMATS:
            out = render_report(report, fmt)
            assert isinstance(out, bytes)
            assert out.endswith(b"\n")

    def test_unknown_format(self):
        with pytest.raises(UnsupportedFormat):
            render_report(small_report(), "pdf")
