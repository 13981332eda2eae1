"""Fixed-width feature vectors for EDU pairs.

Two modes.  ``hash`` is the self-contained featurizer: lowercased
alphanumeric tokens, token n-grams of the configured orders from each
side (keys ``1:<gram>`` / ``2:<gram>``, gram tokens joined by single
spaces), each key bumping slot ``hash64(key) mod dims``, and the final
vector L2-normalized unless it is all-zero.  ``embedding`` joins
vectors produced elsewhere, keyed by pair id; the toolkit treats them
as opaque reals.

Embedding file schema (JSON Lines): the first record is the header
``{"dim": <int>, "model": <str>, "pooling": <str>}``; every following
record is ``{"id": <int>, "vector": [<dim reals>]}``.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field

import numpy as np

from rhetrel.corpus import LabeledPair
from rhetrel.dataset import EncodedDataset
from rhetrel.errors import (
    DimMismatch,
    DuplicateId,
    EmbeddingFormatError,
    FeatureError,
    MissingEmbedding,
    MissingHeaderRecord,
    NonFiniteValue,
)
from rhetrel.rng import hash64

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

DEFAULT_HASH_DIMS = 2048
DEFAULT_EMBEDDING_DIM = 768


@dataclass(frozen=True)
class FeatureConfig:
    mode: str = "hash"
    dims: int = DEFAULT_HASH_DIMS
    ngram_orders: tuple[int, ...] = (1, 2)
    embedding_dim: int = DEFAULT_EMBEDDING_DIM

    def __post_init__(self):
        if self.mode not in ("hash", "embedding"):
            raise FeatureError(f"unknown feature mode {self.mode!r}")
        if self.dims <= 0:
            raise FeatureError("dims must be positive")
        orders = tuple(sorted(set(self.ngram_orders)))
        if not orders or any(n < 1 for n in orders):
            raise FeatureError("ngram orders must be a non-empty set of ints >= 1")
        object.__setattr__(self, "ngram_orders", orders)
        if self.embedding_dim <= 0:
            raise FeatureError("embedding_dim must be positive")

    @property
    def width(self) -> int:
        return self.dims if self.mode == "hash" else self.embedding_dim

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "dims": self.dims,
            "ngram_orders": list(self.ngram_orders),
            "embedding_dim": self.embedding_dim,
        }

    @staticmethod
    def from_dict(data: dict) -> "FeatureConfig":
        return FeatureConfig(
            mode=data["mode"],
            dims=data["dims"],
            ngram_orders=tuple(data["ngram_orders"]),
            embedding_dim=data["embedding_dim"],
        )


@dataclass(frozen=True)
class EmbeddingTable:
    dim: int
    rows: dict[int, np.ndarray] = field(repr=False)
    model: str = ""
    pooling: str = ""

    def __len__(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class DesignMatrix:
    X: np.ndarray
    y: np.ndarray
    ids: np.ndarray
    feature_config: FeatureConfig

    def __post_init__(self):
        if self.X.ndim != 2:
            raise FeatureError("X must be a 2-d matrix")
        n = self.X.shape[0]
        if len(self.y) != n or len(self.ids) != n:
            raise FeatureError("X, y, and ids must agree on the row count")
        if not np.all(np.isfinite(self.X)):
            raise FeatureError("feature matrix contains non-finite values")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]


def tokenize(text: str) -> list[str]:
    """Lowercased maximal runs of letters and digits."""
    return _TOKEN_RE.findall(text.lower())


def ngram_keys(pair: LabeledPair, orders: tuple[int, ...]) -> list[str]:
    """All hashing keys for a pair, side-prefixed, in scan order."""
    keys: list[str] = []
    for side, text in (("1", pair.edu1), ("2", pair.edu2)):
        tokens = tokenize(text)
        for order in orders:
            for i in range(len(tokens) - order + 1):
                keys.append(f"{side}:{' '.join(tokens[i : i + order])}")
    return keys


def hash_featurize(pair: LabeledPair, config: FeatureConfig) -> np.ndarray:
    """Deterministic hashed n-gram vector, L2-normalized unless all-zero."""
    if config.mode != "hash":
        raise FeatureError("hash_featurize requires hash mode")
    vec = np.zeros(config.dims, dtype=np.float64)
    for key in ngram_keys(pair, config.ngram_orders):
        vec[hash64(key) % config.dims] += 1.0
    norm = math.sqrt(float(np.dot(vec, vec)))
    if norm > 0.0:
        vec /= norm
    return vec


def load_embedding_file(content: str) -> EmbeddingTable:
    """Parse embedding JSONL into an EmbeddingTable.

    Raises MissingHeaderRecord, DimMismatch, DuplicateId,
    NonFiniteValue, or EmbeddingFormatError, each naming the offending
    line or pair id.
    """
    lines = content.split("\n")
    records: list[tuple[int, dict]] = []
    for line_no, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            parsed = json.loads(line)
        except json.JSONDecodeError as exc:
            if not records:
                raise MissingHeaderRecord(f"line 1: unparseable header: {exc}") from None
            raise EmbeddingFormatError(f"line {line_no}: unparseable JSON: {exc}") from None
        if not isinstance(parsed, dict):
            if not records:
                raise MissingHeaderRecord("line 1: header must be a JSON object")
            raise EmbeddingFormatError(f"line {line_no}: record must be a JSON object")
        records.append((line_no, parsed))

    if not records:
        raise MissingHeaderRecord("embedding file is empty")
    _, header = records[0]
    dim = header.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim <= 0:
        raise MissingHeaderRecord(
            'first record must be the header {"dim": <int>, "model": ..., "pooling": ...}'
        )
    model = header.get("model", "")
    pooling = header.get("pooling", "")

    rows: dict[int, np.ndarray] = {}
    for line_no, record in records[1:]:
        rec_id = record.get("id")
        if not isinstance(rec_id, int) or isinstance(rec_id, bool) or rec_id < 0:
            raise EmbeddingFormatError(
                f"line {line_no}: record id must be a non-negative integer"
            )
        if rec_id in rows:
            raise DuplicateId(f"duplicate id {rec_id}")
        vector = record.get("vector")
        if not isinstance(vector, list):
            raise EmbeddingFormatError(f"line {line_no}: id {rec_id}: missing vector")
        if len(vector) != dim:
            raise DimMismatch(
                f"id {rec_id}: vector has {len(vector)} components, header says {dim}"
            )
        values = np.empty(dim, dtype=np.float64)
        for i, component in enumerate(vector):
            if isinstance(component, bool) or not isinstance(component, (int, float)):
                raise EmbeddingFormatError(
                    f"line {line_no}: id {rec_id}: non-numeric vector component"
                )
            values[i] = float(component)
        if not np.all(np.isfinite(values)):
            raise NonFiniteValue(f"id {rec_id}: vector contains NaN or infinity")
        rows[rec_id] = values
    return EmbeddingTable(dim=dim, rows=rows, model=model, pooling=pooling)


def build_design_matrix(
    ds: EncodedDataset,
    config: FeatureConfig,
    table: EmbeddingTable | None = None,
) -> DesignMatrix:
    """Row i is the feature vector of ds.items[i]; y and ids copied in order."""
    ids = np.array([item.id for item in ds.items], dtype=np.int64)
    y = np.array([item.y for item in ds.items], dtype=np.int64)
    if config.mode == "hash":
        X = np.zeros((len(ds), config.dims), dtype=np.float64)
        for i, item in enumerate(ds.items):
            pair = LabeledPair(item.edu1, item.edu2, ds.label_set.name(item.y))
            X[i] = hash_featurize(pair, config)
    else:
        if table is None:
            raise FeatureError("embedding mode requires an embedding table")
        if table.dim != config.embedding_dim:
            raise DimMismatch(
                f"embedding table dim {table.dim} != configured {config.embedding_dim}"
            )
        X = np.zeros((len(ds), table.dim), dtype=np.float64)
        for i, item in enumerate(ds.items):
            if item.id not in table.rows:
                raise MissingEmbedding(f"no embedding for id {item.id}")
            X[i] = table.rows[item.id]
    return DesignMatrix(X=X, y=y, ids=ids, feature_config=config)
