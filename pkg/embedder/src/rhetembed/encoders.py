"""Sequence-pair encoders: pretrained weights when available, a seeded
randomly initialized stand-in when not.

Both supported architectures have a 768-wide hidden state, which is the
dimensionality contract every downstream artifact relies on. Pretrained
weights load from an explicit local directory or from the local model
cache; with neither present the encoder is built from its architecture
config with seeded random weights and a word-level vocabulary derived
from the corpus being processed. The stand-in keeps every interface and
shape of the real model, so the rest of the package cannot tell them
apart; which one ran is recorded in the encoder name.
"""

from __future__ import annotations

import re
from collections.abc import Iterable
from dataclasses import dataclass, field
from typing import Callable

import torch

from rhetembed.errors import EncoderLoadFailure

HIDDEN_SIZE = 768

# name -> (model-hub id, reference depth used by the random-init stand-in)
_ARCHS = {
    "bert-base": ("bert-base-uncased", 12),
    "distilbert-base": ("distilbert-base-uncased", 6),
}
SUPPORTED_ENCODERS = tuple(sorted(_ARCHS))

_SPECIALS = ("[PAD]", "[UNK]", "[CLS]", "[SEP]")
_TOKEN_RE = re.compile(r"[^\W_]+")


@dataclass
class PairEncoder:
    """A tokenizer and model bound together behind one encode() call."""

    name: str
    model: torch.nn.Module
    encode: Callable[[list[str], list[str]], dict[str, torch.Tensor]] = field(
        repr=False
    )
    hidden_size: int = HIDDEN_SIZE


def corpus_vocab(texts: Iterable[str]) -> dict[str, int]:
    """Word-level vocabulary: four special tokens, then the corpus words sorted."""
    words = sorted({t for text in texts for t in _TOKEN_RE.findall(text.lower())})
    return {token: i for i, token in enumerate([*_SPECIALS, *words])}


def _word_ids(vocab: dict[str, int], text: str) -> list[int]:
    unk = vocab["[UNK]"]
    return [vocab.get(t, unk) for t in _TOKEN_RE.findall(text.lower())]


def _encode_pair(
    vocab: dict[str, int], edu1: str, edu2: str, max_length: int
) -> tuple[list[int], list[int]]:
    """Build [CLS] edu1 [SEP] edu2 [SEP] ids and segment ids.

    Over-long inputs are trimmed one token at a time from whichever side
    is currently longer, so both segments survive truncation.
    """
    a = _word_ids(vocab, edu1)
    b = _word_ids(vocab, edu2)
    while len(a) + len(b) + 3 > max_length:
        (a if len(a) >= len(b) else b).pop()
    cls, sep = vocab["[CLS]"], vocab["[SEP]"]
    ids = [cls, *a, sep, *b, sep]
    segments = [0] * (len(a) + 2) + [1] * (len(b) + 1)
    return ids, segments


def _make_fallback_encode(
    vocab: dict[str, int], max_length: int, with_segments: bool
) -> Callable[[list[str], list[str]], dict[str, torch.Tensor]]:
    def encode(edu1s: list[str], edu2s: list[str]) -> dict[str, torch.Tensor]:
        rows = [_encode_pair(vocab, a, b, max_length) for a, b in zip(edu1s, edu2s)]
        width = max(len(ids) for ids, _ in rows)
        n = len(rows)
        input_ids = torch.zeros((n, width), dtype=torch.long)
        attention = torch.zeros((n, width), dtype=torch.long)
        segments = torch.zeros((n, width), dtype=torch.long)
        for i, (ids, segs) in enumerate(rows):
            input_ids[i, : len(ids)] = torch.tensor(ids)
            attention[i, : len(ids)] = 1
            segments[i, : len(segs)] = torch.tensor(segs)
        batch = {"input_ids": input_ids, "attention_mask": attention}
        if with_segments:
            batch["token_type_ids"] = segments
        return batch

    return encode


def _model_width(config) -> int | None:
    return getattr(config, "hidden_size", getattr(config, "dim", None))


def _pretrained(
    name: str, source: str, num_labels: int | None, max_length: int, local_only: bool
) -> PairEncoder:
    from transformers import (
        AutoModel,
        AutoModelForSequenceClassification,
        AutoTokenizer,
    )

    try:
        tokenizer = AutoTokenizer.from_pretrained(source, local_files_only=local_only)
        if num_labels is None:
            model = AutoModel.from_pretrained(source, local_files_only=local_only)
        else:
            model = AutoModelForSequenceClassification.from_pretrained(
                source, num_labels=num_labels, local_files_only=local_only
            )
    except Exception as exc:
        raise EncoderLoadFailure(f"cannot load {name} from {source}: {exc}") from None
    width = _model_width(model.config)
    if width != HIDDEN_SIZE:
        raise EncoderLoadFailure(
            f"{source}: hidden width {width}, the pipeline requires {HIDDEN_SIZE}"
        )

    def encode(edu1s: list[str], edu2s: list[str]) -> dict[str, torch.Tensor]:
        return dict(
            tokenizer(
                edu1s,
                edu2s,
                truncation=True,
                max_length=max_length,
                padding=True,
                return_tensors="pt",
            )
        )

    return PairEncoder(name=f"{name} ({source})", model=model, encode=encode)


def _seeded_stand_in(
    name: str,
    corpus_texts: Iterable[str],
    seed: int,
    layers: int,
    num_labels: int | None,
    max_length: int,
) -> PairEncoder:
    vocab = corpus_vocab(corpus_texts)
    # Seeding immediately before construction makes the parameter draw a
    # pure function of (seed, vocab size, architecture).
    torch.manual_seed(seed)
    if name == "bert-base":
        from transformers import BertConfig, BertForSequenceClassification, BertModel

        config = BertConfig(
            vocab_size=len(vocab),
            hidden_size=HIDDEN_SIZE,
            num_hidden_layers=layers,
            num_attention_heads=12,
            intermediate_size=3072,
            max_position_embeddings=512,
            num_labels=num_labels or 2,
        )
        model = BertModel(config) if num_labels is None else BertForSequenceClassification(config)
        with_segments = True
    else:
        from transformers import (
            DistilBertConfig,
            DistilBertForSequenceClassification,
            DistilBertModel,
        )

        config = DistilBertConfig(
            vocab_size=len(vocab),
            dim=HIDDEN_SIZE,
            n_layers=layers,
            n_heads=12,
            hidden_dim=3072,
            max_position_embeddings=512,
            num_labels=num_labels or 2,
        )
        model = (
            DistilBertModel(config)
            if num_labels is None
            else DistilBertForSequenceClassification(config)
        )
        with_segments = False
    return PairEncoder(
        name=f"{name} random-init (seed={seed}, layers={layers}, vocab={len(vocab)})",
        model=model,
        encode=_make_fallback_encode(vocab, max_length, with_segments),
    )


def build_encoder(
    name: str,
    *,
    corpus_texts: Iterable[str],
    seed: int = 0,
    layers: int | None = None,
    weights_path: str | None = None,
    num_labels: int | None = None,
    max_length: int = 128,
) -> PairEncoder:
    """Construct the named encoder, preferring real weights over the stand-in.

    With ``num_labels`` the model carries a sequence-classification head;
    without it the bare encoder is returned for feature extraction.
    ``layers`` overrides the stand-in's depth only.
    """
    if name not in _ARCHS:
        raise EncoderLoadFailure(
            f"unsupported encoder {name!r}; expected one of {', '.join(SUPPORTED_ENCODERS)}"
        )
    if layers is not None and layers < 1:
        raise EncoderLoadFailure(f"layers must be >= 1, got {layers}")
    hub_id, default_layers = _ARCHS[name]
    if weights_path is not None:
        return _pretrained(name, weights_path, num_labels, max_length, local_only=True)
    try:
        return _pretrained(name, hub_id, num_labels, max_length, local_only=True)
    except EncoderLoadFailure:
        pass
    return _seeded_stand_in(
        name, corpus_texts, seed, layers or default_layers, num_labels, max_length
    )
