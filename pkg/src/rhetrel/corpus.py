"""Ingest formats: the labeled-pair CSV and the standoff span/relation file.

Pair CSV: UTF-8, header ``EDU1,EDU2,Label``, RFC-4180 quoting.  Written
with LF line endings and minimal quoting (a field is quoted iff it
contains a comma, a double quote, or a newline); CRLF is accepted on
read.  Diagnostics count data rows from 1.

Standoff format (``.rsta``), line-oriented:

    #DOC <doc-id>                   exactly once, first line
    #TEXT <text>                    one or more; joined with "\\n"
    SPAN <span-id> <start> <end>    offsets count Unicode scalar values
    REL <source-id> <target-id> <Label>

Other lines starting with ``#`` in column 0 are comments, blank lines
are ignored, and fields are separated by single spaces except the
``#TEXT`` remainder, which is taken verbatim.  Spans may nest or
overlap; a relation may point at any declared span, including one that
covers several discourse units.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field

from rhetrel.errors import (
    BadOffset,
    DanglingRelation,
    DuplicateSpanId,
    EmptyEdu,
    MalformedRow,
    MissingHeader,
    StandoffSyntaxError,
)
from rhetrel.labels import DEFAULT_LABELS, LabelSet

PAIR_CSV_HEADER = ("EDU1", "EDU2", "Label")

_SPAN_ID_RE = re.compile(r"^[A-Za-z0-9_-]+$")
_DECIMAL_RE = re.compile(r"^\d+$")

# Fields larger than the csv module's default 128 KiB limit are legal.
csv.field_size_limit(1 << 24)


@dataclass(frozen=True)
class LabeledPair:
    """One (EDU1 text, EDU2 text, relation label) instance."""

    edu1: str
    edu2: str
    label: str

    def __post_init__(self):
        if not self.edu1:
            raise EmptyEdu("edu1 is empty")
        if not self.edu2:
            raise EmptyEdu("edu2 is empty")
        if not self.label:
            raise ValueError("label is empty")


@dataclass(frozen=True)
class Span:
    span_id: str
    start: int
    end: int


@dataclass(frozen=True)
class Relation:
    source: str
    target: str
    label: str


@dataclass(frozen=True)
class AnnotatedDocument:
    """Raw text plus its span layer and directed relation layer."""

    doc_id: str
    text: str
    spans: tuple[Span, ...]
    relations: tuple[Relation, ...]
    _span_index: dict[str, Span] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        index: dict[str, Span] = {}
        for span in self.spans:
            if span.span_id in index:
                raise DuplicateSpanId(f"duplicate span id {span.span_id!r}")
            if not (0 <= span.start < span.end <= len(self.text)):
                raise BadOffset(
                    f"span {span.span_id!r} offsets {span.start}..{span.end} "
                    f"fall outside the 0..{len(self.text)} text"
                )
            index[span.span_id] = span
        for rel in self.relations:
            for span_id in (rel.source, rel.target):
                if span_id not in index:
                    raise DanglingRelation(
                        f"relation references undeclared span {span_id!r}"
                    )
        object.__setattr__(self, "_span_index", index)

    def span(self, span_id: str) -> Span:
        return self._span_index[span_id]

    def span_text(self, span_id: str) -> str:
        span = self._span_index[span_id]
        return self.text[span.start : span.end]


def parse_pair_csv(
    content: str, label_set: LabelSet | None = None
) -> list[LabeledPair]:
    """Parse pair-CSV text into LabeledPairs, validating labels.

    Raises MissingHeader, MalformedRow, EmptyEdu, or UnknownLabel, each
    carrying the 1-based data-row number (the header error reports row
    1, the file's first physical row).
    """
    label_set = label_set or LabelSet(DEFAULT_LABELS)
    if content.startswith("﻿"):
        content = content[1:]
    reader = csv.reader(io.StringIO(content, newline=""))
    try:
        header = next(reader, None)
    except csv.Error as exc:
        raise MissingHeader(f"unreadable header row: {exc}", 1) from None
    if header is None or tuple(header) != PAIR_CSV_HEADER:
        raise MissingHeader(
            f"first row must be the header {','.join(PAIR_CSV_HEADER)!r}", 1
        )
    pairs: list[LabeledPair] = []
    row_no = 0
    while True:
        row_no += 1
        try:
            row = next(reader, None)
        except csv.Error as exc:
            raise MalformedRow(f"unparseable record: {exc}", row_no) from None
        if row is None:
            break
        if len(row) != 3:
            raise MalformedRow(f"expected 3 fields, found {len(row)}", row_no)
        edu1, edu2, raw_label = row
        if not edu1:
            raise EmptyEdu("EDU1 is empty", row_no)
        if not edu2:
            raise EmptyEdu("EDU2 is empty", row_no)
        label = label_set.normalize(raw_label, row_no)
        pairs.append(LabeledPair(edu1, edu2, label))
    return pairs


def _csv_field(value: str) -> str:
    # csv.writer leaves a bare CR unquoted, which splits the record on
    # re-read, so minimal quoting is done by hand: quote iff the field
    # contains a comma, a double quote, or a CR/LF.
    if any(ch in value for ch in ',"\r\n'):
        return '"' + value.replace('"', '""') + '"'
    return value


def write_pair_csv(pairs: list[LabeledPair]) -> str:
    """Serialize pairs as pair-CSV text; the dual of parse_pair_csv."""
    lines = [",".join(PAIR_CSV_HEADER)]
    for pair in pairs:
        lines.append(
            ",".join(_csv_field(f) for f in (pair.edu1, pair.edu2, pair.label))
        )
    return "\n".join(lines) + "\n"


def _split_fields(line: str) -> list[str]:
    """Split a directive line on single spaces; "" marks a run of spaces."""
    return line.split(" ")


def parse_standoff(
    content: str, label_set: LabelSet | None = None
) -> AnnotatedDocument:
    """Parse one standoff document, enforcing every document invariant.

    Relations may reference spans declared later in the file; integrity
    is checked once the whole file is read, and each diagnostic carries
    the 1-based line number of the offending declaration.
    """
    label_set = label_set or LabelSet(DEFAULT_LABELS)
    if content.startswith("﻿"):
        content = content[1:]
    lines = content.split("\n")
    if lines and lines[-1] == "":
        lines.pop()

    doc_id: str | None = None
    text_lines: list[str] = []
    spans: list[tuple[int, Span]] = []
    relations: list[tuple[int, Relation]] = []
    seen_span_ids: dict[str, int] = {}

    for line_no, line in enumerate(lines, start=1):
        line = line.rstrip("\r")
        if line_no == 1:
            if not line.startswith("#DOC "):
                raise StandoffSyntaxError("first line must be '#DOC <doc-id>'", 1)
            doc_id = line[len("#DOC ") :]
            if not doc_id or doc_id != doc_id.strip():
                raise StandoffSyntaxError("malformed document id", 1)
            continue
        if line == "" or line.strip() == "":
            continue
        if line.startswith("#TEXT "):
            text_lines.append(line[len("#TEXT ") :])
            continue
        if line == "#TEXT":
            text_lines.append("")
            continue
        if line.startswith("#DOC "):
            raise StandoffSyntaxError("#DOC may appear only on the first line", line_no)
        if line.startswith("#"):
            continue
        fields = _split_fields(line)
        if fields[0] == "SPAN":
            if len(fields) != 4 or "" in fields:
                raise StandoffSyntaxError(
                    "SPAN takes exactly '<span-id> <start> <end>'", line_no
                )
            span_id, start_s, end_s = fields[1], fields[2], fields[3]
            if not _SPAN_ID_RE.match(span_id):
                raise StandoffSyntaxError(f"invalid span id {span_id!r}", line_no)
            if not (_DECIMAL_RE.match(start_s) and _DECIMAL_RE.match(end_s)):
                raise StandoffSyntaxError("span offsets must be decimal", line_no)
            if span_id in seen_span_ids:
                raise DuplicateSpanId(
                    f"span id {span_id!r} already declared on line "
                    f"{seen_span_ids[span_id]}",
                    line_no,
                )
            seen_span_ids[span_id] = line_no
            spans.append((line_no, Span(span_id, int(start_s), int(end_s))))
        elif fields[0] == "REL":
            if len(fields) != 4 or "" in fields:
                raise StandoffSyntaxError(
                    "REL takes exactly '<source-id> <target-id> <Label>'", line_no
                )
            source, target, raw_label = fields[1], fields[2], fields[3]
            label = label_set.normalize(raw_label, line_no, kind="line")
            relations.append((line_no, Relation(source, target, label)))
        else:
            raise StandoffSyntaxError(f"unrecognized line {line!r}", line_no)

    if doc_id is None:
        raise StandoffSyntaxError("empty input: first line must be '#DOC <doc-id>'", 1)
    if not text_lines:
        raise StandoffSyntaxError("document has no #TEXT line", 1)

    text = "\n".join(text_lines)
    for line_no, span in spans:
        if not (0 <= span.start < span.end <= len(text)):
            raise BadOffset(
                f"span {span.span_id!r} offsets {span.start}..{span.end} fall "
                f"outside the 0..{len(text)} text",
                line_no,
            )
    for line_no, rel in relations:
        for span_id in (rel.source, rel.target):
            if span_id not in seen_span_ids:
                raise DanglingRelation(
                    f"relation references undeclared span {span_id!r}", line_no
                )
    return AnnotatedDocument(
        doc_id=doc_id,
        text=text,
        spans=tuple(span for _, span in spans),
        relations=tuple(rel for _, rel in relations),
    )


def pairs_from_document(doc: AnnotatedDocument) -> list[LabeledPair]:
    """One LabeledPair per relation, in declaration order.

    edu1/edu2 are the source/target span texts with surrounding
    whitespace trimmed; a span that slices to whitespace-only text
    raises EmptyEdu.
    """
    pairs: list[LabeledPair] = []
    for rel in doc.relations:
        edu1 = doc.span_text(rel.source).strip()
        edu2 = doc.span_text(rel.target).strip()
        if not edu1:
            raise EmptyEdu(f"span {rel.source!r} slices to whitespace-only text")
        if not edu2:
            raise EmptyEdu(f"span {rel.target!r} slices to whitespace-only text")
        pairs.append(LabeledPair(edu1, edu2, rel.label))
    return pairs


def class_histogram(
    pairs: list[LabeledPair], label_set: LabelSet | None = None
) -> dict[str, int]:
    """Per-label counts with every inventory label present as a key."""
    label_set = label_set or LabelSet(DEFAULT_LABELS)
    counts = {name: 0 for name in label_set.labels}
    for pair in pairs:
        if pair.label not in counts:
            raise label_set.unknown(pair.label)
        counts[pair.label] += 1
    return counts
