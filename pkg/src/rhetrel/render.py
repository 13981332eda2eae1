"""Plain-text, CSV, and SVG renderings of evaluation reports.

The text form prints a summary line, a per-class table, and an aligned
confusion grid.  The CSV form carries only the confusion matrix, with
label names as both header row and leading column, and survives a
round-trip through a CSV parser.  The SVG form is a heatmap with one
rect per confusion cell, shaded in proportion to its count.
"""

from __future__ import annotations

import csv
import io
from xml.etree import ElementTree as ET

from rhetrel.errors import UnsupportedFormat
from rhetrel.evaluation import EvalReport

FORMATS = ("text", "csv", "svg")

_CELL = 44  # heatmap cell edge in px
_LEFT = 150  # left margin, holds row labels
_TOP = 120  # top margin, holds rotated column labels
_SVG_NS = "http://www.w3.org/2000/svg"


def render_report(report: EvalReport, fmt: str) -> bytes:
    """Render ``report`` in one of the formats listed in FORMATS."""
    if fmt == "text":
        return _render_text(report)
    if fmt == "csv":
        return _render_csv(report)
    if fmt == "svg":
        return _render_svg(report)
    raise UnsupportedFormat(
        f"unknown report format {fmt!r}; choose from {', '.join(FORMATS)}"
    )


def _fmt(value: float) -> str:
    return f"{value:.4f}"


def _render_text(report: EvalReport) -> bytes:
    labels = [m.label for m in report.per_class]
    ce = (
        "-"
        if report.mean_cross_entropy is None
        else _fmt(report.mean_cross_entropy)
    )
    lines = [
        f"n={report.n}  accuracy={_fmt(report.accuracy)}  "
        f"weighted_f1={_fmt(report.weighted_f1)}  mean_cross_entropy={ce}",
        "",
    ]
    name_w = max(len("label"), max((len(l) for l in labels), default=0))
    lines.append(
        f"{'label':<{name_w}}  {'precision':>9}  {'recall':>6}  "
        f"{'f1':>6}  {'support':>7}"
    )
    for m in report.per_class:
        lines.append(
            f"{m.label:<{name_w}}  {_fmt(m.precision):>9}  "
            f"{_fmt(m.recall):>6}  {_fmt(m.f1):>6}  {m.support:>7}"
        )
    lines.append("")
    lines.append("confusion (rows = true, columns = predicted)")
    k = len(labels)
    col_w = [
        max(
            len(labels[c]),
            max((len(str(report.confusion[r][c])) for r in range(k)), default=1),
        )
        for c in range(k)
    ]
    lines.append(
        " " * name_w
        + "  "
        + "  ".join(f"{labels[c]:>{col_w[c]}}" for c in range(k))
    )
    for r, label in enumerate(labels):
        cells = "  ".join(
            f"{report.confusion[r][c]:>{col_w[c]}}" for c in range(k)
        )
        lines.append(f"{label:<{name_w}}  {cells}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def _render_csv(report: EvalReport) -> bytes:
    labels = [m.label for m in report.per_class]
    buf = io.StringIO()
    writer = csv.writer(buf, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
    writer.writerow([""] + labels)
    for label, row in zip(labels, report.confusion):
        writer.writerow([label] + [str(v) for v in row])
    return buf.getvalue().encode("utf-8")


def _shade(intensity: float) -> str:
    # White at zero through a dark blue at the matrix maximum.
    r = round(255 + (31 - 255) * intensity)
    g = round(255 + (78 - 255) * intensity)
    b = round(255 + (121 - 255) * intensity)
    return f"rgb({r},{g},{b})"


def _render_svg(report: EvalReport) -> bytes:
    labels = [m.label for m in report.per_class]
    k = len(labels)
    width = _LEFT + k * _CELL + 20
    height = _TOP + k * _CELL + 40
    peak = max((max(row) for row in report.confusion), default=0)
    root = ET.Element(
        "svg",
        {
            "xmlns": _SVG_NS,
            "width": str(width),
            "height": str(height),
            "viewBox": f"0 0 {width} {height}",
        },
    )
    title = ET.SubElement(root, "title")
    title.text = "confusion matrix (rows = true, columns = predicted)"
    for c, label in enumerate(labels):
        x = _LEFT + c * _CELL + _CELL // 2
        y = _TOP - 8
        col_text = ET.SubElement(
            root,
            "text",
            {
                "x": str(x),
                "y": str(y),
                "transform": f"rotate(-45 {x} {y})",
                "font-size": "12",
                "font-family": "sans-serif",
                "text-anchor": "start",
            },
        )
        col_text.text = label
    for r, label in enumerate(labels):
        row_text = ET.SubElement(
            root,
            "text",
            {
                "x": str(_LEFT - 8),
                "y": str(_TOP + r * _CELL + _CELL // 2 + 4),
                "font-size": "12",
                "font-family": "sans-serif",
                "text-anchor": "end",
            },
        )
        row_text.text = label
    for r in range(k):
        for c in range(k):
            count = report.confusion[r][c]
            intensity = count / peak if peak else 0.0
            x = _LEFT + c * _CELL
            y = _TOP + r * _CELL
            ET.SubElement(
                root,
                "rect",
                {
                    "class": "cell",
                    "x": str(x),
                    "y": str(y),
                    "width": str(_CELL),
                    "height": str(_CELL),
                    "fill": _shade(intensity),
                    "stroke": "#444444",
                    "stroke-width": "1",
                },
            )
            count_text = ET.SubElement(
                root,
                "text",
                {
                    "x": str(x + _CELL // 2),
                    "y": str(y + _CELL // 2 + 4),
                    "font-size": "12",
                    "font-family": "sans-serif",
                    "text-anchor": "middle",
                    "fill": "#ffffff" if intensity > 0.5 else "#000000",
                },
            )
            count_text.text = str(count)
    summary = ET.SubElement(
        root,
        "text",
        {
            "x": str(_LEFT),
            "y": str(_TOP + k * _CELL + 24),
            "font-size": "13",
            "font-family": "sans-serif",
        },
    )
    summary.text = f"n={report.n}  accuracy={report.accuracy:.4f}"
    return ET.tostring(root, encoding="utf-8") + b"\n"
