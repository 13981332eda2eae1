"""Reader for the labeled EDU-pair CSV format.

This package talks to the classification pipeline only through its file
formats, so the pair-CSV contract is restated here rather than imported:
header ``EDU1,EDU2,Label``, one pair per data row, minimal quoting, the
eight-relation label inventory below (case-insensitive, with the
"Re-statement" spelling accepted for Restatement).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from rhetembed.errors import InputParseError

LABELS = (
    "Elaboration",
    "Background",
    "Contrast",
    "Narration",
    "Concession",
    "Restatement",
    "Cause-Effect",
    "Joint",
)
CODES = {name: code for code, name in enumerate(LABELS)}

_ALIASES = {"re-statement": "Restatement"}
_HEADER = ("EDU1", "EDU2", "Label")


@dataclass(frozen=True)
class Pair:
    """One labeled EDU pair; id is the 0-based data-row index of its file."""

    id: int
    edu1: str
    edu2: str
    label: str

    @property
    def code(self) -> int:
        return CODES[self.label]


def normalize_label(raw: str, row_no: int) -> str:
    """Map an ingest spelling to its canonical label name."""
    lowered = raw.strip().lower()
    if lowered in _ALIASES:
        return _ALIASES[lowered]
    for canonical in LABELS:
        if canonical.lower() == lowered:
            return canonical
    raise InputParseError(f"row {row_no}: unknown label {raw!r}")


def read_pairs(content: str) -> list[Pair]:
    """Parse pair-CSV text; raises InputParseError on any format violation."""
    if content.startswith("﻿"):
        content = content[1:]
    try:
        rows = [row for row in csv.reader(io.StringIO(content, newline="")) if row]
    except csv.Error as exc:
        raise InputParseError(f"unparseable CSV: {exc}") from None
    if not rows:
        raise InputParseError("file is empty")
    if tuple(rows[0]) != _HEADER:
        raise InputParseError(
            "header must be " + ",".join(_HEADER) + f", got {rows[0]!r}"
        )
    pairs: list[Pair] = []
    for row_no, row in enumerate(rows[1:], start=1):
        if len(row) != 3:
            raise InputParseError(f"row {row_no}: expected 3 fields, got {len(row)}")
        edu1, edu2, raw_label = row
        if not edu1 or not edu2:
            raise InputParseError(f"row {row_no}: empty EDU")
        label = normalize_label(raw_label, row_no)
        pairs.append(Pair(id=row_no - 1, edu1=edu1, edu2=edu2, label=label))
    return pairs


def read_pairs_file(path: str) -> list[Pair]:
    """Read and parse one pair CSV, prefixing diagnostics with the path."""
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            content = fh.read()
    except OSError as exc:
        raise InputParseError(f"{path}: {exc}") from None
    try:
        return read_pairs(content)
    except InputParseError as exc:
        raise InputParseError(f"{path}: {exc}") from None
