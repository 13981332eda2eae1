"""Exception types raised by the toolkit.

Every parser diagnostic carries a 1-based location: ``row`` counts data
rows of a pair CSV (the header error reports row 1, the file's first
physical row), ``line`` counts physical lines of a standoff or JSONL
file.  Parsing is total: malformed input raises exactly one of these,
never an arbitrary exception.
"""

from __future__ import annotations


class RhetrelError(ValueError):
    """Base class for all toolkit errors."""


class CorpusError(RhetrelError):
    """Base class for ingest-format diagnostics.

    ``location`` is the 1-based row or line number the diagnostic refers
    to, or None when the problem is not tied to one record.  ``kind``
    says which it counts: "row" for pair-CSV data rows, "line" for
    physical lines of a standoff or JSONL file.
    """

    def __init__(self, message: str, location: int | None = None, kind: str = "row"):
        self.location = location
        self.location_kind = kind
        if location is not None:
            message = f"{kind} {location}: {message}"
        super().__init__(message)


class StandoffError(CorpusError):
    def __init__(self, message: str, location: int | None = None, kind: str = "line"):
        super().__init__(message, location, kind)


class MissingHeader(CorpusError):
    """Pair CSV does not start with the expected header row."""


class MalformedRow(CorpusError):
    """Pair CSV data row does not have exactly three fields."""


class UnknownLabel(CorpusError):
    """A relation label is not in the label inventory."""


class EmptyEdu(CorpusError):
    """A discourse-unit text is empty."""


class StandoffSyntaxError(StandoffError):
    """A standoff line matches no production of the grammar."""


class BadOffset(StandoffError):
    """A span lies outside the document text or has start >= end."""


class DuplicateSpanId(StandoffError):
    """Two spans share an id."""


class DanglingRelation(StandoffError):
    """A relation references a span id that was never declared."""


class DatasetError(RhetrelError):
    """Base class for encoding / splitting / balancing errors."""


class EmptyClass(DatasetError):
    """A class required to have items has none."""

    def __init__(self, label: str):
        self.label = label
        super().__init__(f"class {label!r} has no items")


class EmptyDataset(DatasetError):
    """An operation that needs at least one item got none."""


class FeatureError(RhetrelError):
    """Base class for featurization errors."""


class MissingHeaderRecord(FeatureError):
    """Embedding JSONL does not start with a valid header record."""


class DimMismatch(FeatureError):
    """A vector's width disagrees with the declared dimension."""


class DuplicateId(FeatureError):
    """Two embedding records share a pair id."""


class NonFiniteValue(FeatureError):
    """An embedding vector contains NaN or infinity."""


class EmbeddingFormatError(FeatureError):
    """An embedding JSONL line is not a well-formed record."""


class MissingEmbedding(FeatureError):
    """The embedding table has no vector for a required pair id."""


class ModelError(RhetrelError):
    """Base class for training / prediction errors."""


class DimensionMismatch(ModelError):
    """Matrix shapes disagree with the model's dimensions."""


class NonFiniteLoss(ModelError):
    """Training produced a non-finite loss (divergent learning rate)."""


class EvalError(RhetrelError):
    """Base class for metric-computation errors."""


class LengthMismatch(EvalError):
    """Paired inputs have different lengths."""


class EmptyInput(EvalError):
    """A metric got zero items."""


class CodeOutOfRange(EvalError):
    """A class code is outside 0..K-1."""


class MalformedProbRow(EvalError):
    """A probability row does not sum to 1 or leaves [0, 1]."""


class UnsupportedFormat(RhetrelError):
    """An unknown report output format was requested."""
