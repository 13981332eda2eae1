"""Frozen-encoder embedding extraction for EDU pairs.

Each pair is encoded jointly as one two-segment sequence and represented
by the final-layer hidden state of its first (classification) token, so
every pair maps to a single 768-component vector. Output is embedding
JSONL: a header record declaring dim, model, and pooling, then one
record per pair id.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import torch

from rhetembed.encoders import build_encoder
from rhetembed.output import atomic_write_text
from rhetembed.pairs import Pair, read_pairs_file

POOLING = "first-token"


@dataclass
class EmbedJob:
    """Parameters of one extraction run."""

    input_path: str
    output_path: str
    encoder: str = "bert-base"
    pooling: str = POOLING
    weights_path: str | None = None
    seed: int = 0
    layers: int | None = None
    max_length: int = 128
    batch_size: int = 32
    # Pair CSV the stand-in derives its vocabulary from; defaults to the
    # input. Pin it to one file when several splits must share an encoder.
    vocab_corpus_path: str | None = None

    def __post_init__(self):
        if self.pooling != POOLING:
            raise ValueError(f"pooling must be {POOLING!r}, got {self.pooling!r}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.max_length < 8:
            raise ValueError(f"max_length must be >= 8, got {self.max_length}")


def _first_token_states(enc, pairs: list[Pair], batch_size: int) -> list[torch.Tensor]:
    enc.model.eval()
    states: list[torch.Tensor] = []
    with torch.inference_mode():
        for start in range(0, len(pairs), batch_size):
            chunk = pairs[start : start + batch_size]
            batch = enc.encode([p.edu1 for p in chunk], [p.edu2 for p in chunk])
            hidden = enc.model(**batch).last_hidden_state
            states.extend(hidden[:, 0, :])
    return states


def extract_embeddings(job: EmbedJob) -> int:
    """Embed every pair of the input file; returns the record count.

    Raises InputParseError for unreadable or malformed input and
    EncoderLoadFailure when the encoder cannot be constructed.
    """
    pairs = read_pairs_file(job.input_path)
    vocab_pairs = pairs
    if job.vocab_corpus_path is not None:
        vocab_pairs = read_pairs_file(job.vocab_corpus_path)
    texts = [p.edu1 for p in vocab_pairs] + [p.edu2 for p in vocab_pairs]
    enc = build_encoder(
        job.encoder,
        corpus_texts=texts,
        seed=job.seed,
        layers=job.layers,
        weights_path=job.weights_path,
        max_length=job.max_length,
    )
    states = _first_token_states(enc, pairs, job.batch_size)
    lines = [
        json.dumps({"dim": enc.hidden_size, "model": enc.name, "pooling": job.pooling})
    ]
    for pair, vec in zip(pairs, states):
        lines.append(
            json.dumps({"id": pair.id, "vector": [float(x) for x in vec]})
        )
    atomic_write_text(job.output_path, "\n".join(lines) + "\n")
    return len(pairs)
