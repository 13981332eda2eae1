"""Rhetorical-relation classification toolkit.

Ingests span/relation annotations over elementary discourse units,
builds balanced labeled-pair datasets, trains a from-scratch softmax
regression on hashed n-gram or externally supplied embedding features,
and produces evaluation reports (accuracy, weighted F1, cross-entropy,
confusion matrices, ranked error analyses).
"""

__version__ = "0.1.0"

from rhetrel.labels import DEFAULT_LABELS, LabelSet
from rhetrel.corpus import (
    AnnotatedDocument,
    LabeledPair,
    class_histogram,
    pairs_from_document,
    parse_pair_csv,
    parse_standoff,
    write_pair_csv,
)

__all__ = [
    "DEFAULT_LABELS",
    "LabelSet",
    "LabeledPair",
    "AnnotatedDocument",
    "parse_pair_csv",
    "write_pair_csv",
    "parse_standoff",
    "pairs_from_document",
    "class_histogram",
    "__version__",
]
