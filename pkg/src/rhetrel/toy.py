"""Bundled synthetic corpus: twelve standoff documents of invented
cricket reporting, 69 pairs, all eight relations represented with
deliberately imbalanced counts.  Regenerate with
scripts/make_toy_corpus.py; the files are deterministic.
"""

from __future__ import annotations

from importlib import resources

from rhetrel.corpus import parse_standoff, pairs_from_document, LabeledPair
from rhetrel.labels import LabelSet


def toy_corpus_paths() -> list[str]:
    """Absolute paths of the bundled .rsta files, sorted by name."""
    root = resources.files("rhetrel").joinpath("data/toy")
    return sorted(str(entry) for entry in root.iterdir() if entry.name.endswith(".rsta"))


def load_toy_pairs(label_set: LabelSet | None = None) -> list[LabeledPair]:
    """All toy pairs in document order, then relation order."""
    label_set = label_set or LabelSet()
    pairs: list[LabeledPair] = []
    for path in toy_corpus_paths():
        with open(path, encoding="utf-8") as fh:
            doc = parse_standoff(fh.read(), label_set)
        pairs.extend(pairs_from_document(doc))
    return pairs
