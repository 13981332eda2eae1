"""Fine-tuning recipe for the sequence-pair relation classifier.

A classification head over the encoder is trained with AdamW at the
recipe defaults (batch 64, 20 epochs, learning rate 2e-5, weight decay
0.01, evaluation at the end of every epoch). Outputs are a per-epoch
metrics JSON that echoes the hyperparameters and a test-set predictions
CSV with per-class probabilities, both in the pipeline's documented
formats.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable

import torch

from rhetembed.encoders import PairEncoder, build_encoder
from rhetembed.errors import InputParseError, OutOfMemory
from rhetembed.output import atomic_write_text
from rhetembed.pairs import LABELS, Pair, read_pairs_file


@dataclass
class FinetuneJob:
    """Parameters of one fine-tuning run."""

    train_path: str
    validation_path: str
    test_path: str
    predictions_path: str
    metrics_path: str
    encoder: str = "bert-base"
    batch_size: int = 64
    epochs: int = 20
    learning_rate: float = 2e-5
    weight_decay: float = 0.01
    seed: int = 0
    weights_path: str | None = None
    layers: int | None = None
    max_length: int = 128

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.weight_decay < 0:
            raise ValueError(f"weight_decay must be >= 0, got {self.weight_decay}")
        if self.max_length < 8:
            raise ValueError(f"max_length must be >= 8, got {self.max_length}")


def _accuracy(y_true: list[int], y_pred: list[int]) -> float:
    return sum(t == p for t, p in zip(y_true, y_pred)) / len(y_true)


def _weighted_f1(y_true: list[int], y_pred: list[int], k: int) -> float:
    """Support-weighted mean of per-class F1, zero where undefined."""
    total = 0.0
    for c in range(k):
        tp = sum(t == c and p == c for t, p in zip(y_true, y_pred))
        fp = sum(t != c and p == c for t, p in zip(y_true, y_pred))
        fn = sum(t == c and p != c for t, p in zip(y_true, y_pred))
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = (
            2 * precision * recall / (precision + recall) if precision + recall else 0.0
        )
        total += f1 * (tp + fn)
    return total / len(y_true)


def _is_oom(exc: BaseException) -> bool:
    """Allocator failures surface as RuntimeError on CPU and as
    torch.cuda.OutOfMemoryError on GPU."""
    return isinstance(exc, torch.cuda.OutOfMemoryError) or "memory" in str(exc).lower()


def _logits(enc: PairEncoder, pairs: list[Pair], batch_size: int) -> torch.Tensor:
    enc.model.eval()
    chunks = []
    with torch.inference_mode():
        for start in range(0, len(pairs), batch_size):
            chunk = pairs[start : start + batch_size]
            batch = enc.encode([p.edu1 for p in chunk], [p.edu2 for p in chunk])
            chunks.append(enc.model(**batch).logits)
    enc.model.train()
    return torch.cat(chunks)


def _split_metrics(
    enc: PairEncoder, pairs: list[Pair], batch_size: int
) -> tuple[float, float, float]:
    logits = _logits(enc, pairs, batch_size)
    y_true = [p.code for p in pairs]
    loss = float(
        torch.nn.functional.cross_entropy(
            logits, torch.tensor(y_true), reduction="mean"
        )
    )
    y_pred = [int(c) for c in logits.argmax(dim=-1)]
    return loss, _accuracy(y_true, y_pred), _weighted_f1(y_true, y_pred, len(LABELS))


def _optimizer(model: torch.nn.Module, lr: float, weight_decay: float):
    # The standard fine-tuning convention: biases and layer-norm
    # parameters are exempt from weight decay.
    decay, no_decay = [], []
    for name, param in model.named_parameters():
        exempt = name.endswith(".bias") or "layernorm" in name.lower().replace("_", "")
        (no_decay if exempt else decay).append(param)
    return torch.optim.AdamW(
        [
            {"params": decay, "weight_decay": weight_decay},
            {"params": no_decay, "weight_decay": 0.0},
        ],
        lr=lr,
    )


def _read_split(path: str, part: str) -> list[Pair]:
    pairs = read_pairs_file(path)
    if not pairs:
        raise InputParseError(f"{path}: {part} split has no data rows")
    return pairs


def finetune_and_predict(
    job: FinetuneJob, on_epoch: Callable[[dict], None] | None = None
) -> dict:
    """Train, evaluate each epoch, predict the test split; returns the metrics.

    Writes the metrics JSON and the predictions CSV to the job's paths.
    ``on_epoch`` sees each per-epoch record as it is produced.
    """
    train = _read_split(job.train_path, "train")
    validation = _read_split(job.validation_path, "validation")
    test = _read_split(job.test_path, "test")
    texts = [t for p in [*train, *validation, *test] for t in (p.edu1, p.edu2)]
    enc = build_encoder(
        job.encoder,
        corpus_texts=texts,
        seed=job.seed,
        layers=job.layers,
        weights_path=job.weights_path,
        num_labels=len(LABELS),
        max_length=job.max_length,
    )
    opt = _optimizer(enc.model, job.learning_rate, job.weight_decay)
    shuffler = torch.Generator().manual_seed(job.seed)
    y_train = torch.tensor([p.code for p in train])

    per_epoch: list[dict] = []
    try:
        for epoch in range(1, job.epochs + 1):
            enc.model.train()
            perm = torch.randperm(len(train), generator=shuffler)
            batch_losses = []
            for start in range(0, len(train), job.batch_size):
                take = perm[start : start + job.batch_size]
                chunk = [train[i] for i in take]
                batch = enc.encode([p.edu1 for p in chunk], [p.edu2 for p in chunk])
                out = enc.model(**batch, labels=y_train[take])
                out.loss.backward()
                opt.step()
                opt.zero_grad()
                batch_losses.append(float(out.loss))
            _, train_accuracy, _ = _split_metrics(enc, train, job.batch_size)
            val_loss, val_accuracy, val_f1 = _split_metrics(
                enc, validation, job.batch_size
            )
            record = {
                "epoch": epoch,
                "train_loss": sum(batch_losses) / len(batch_losses),
                "train_accuracy": train_accuracy,
                "validation_loss": val_loss,
                "validation_accuracy": val_accuracy,
                "validation_weighted_f1": val_f1,
            }
            per_epoch.append(record)
            if on_epoch is not None:
                on_epoch(record)
        test_logits = _logits(enc, test, job.batch_size)
    except RuntimeError as exc:
        if _is_oom(exc):
            raise OutOfMemory(
                f"out of memory; retry with a smaller batch size "
                f"(current {job.batch_size})"
            ) from None
        raise

    probs = torch.softmax(test_logits.double(), dim=-1)
    lines = ["id,predicted_label," + ",".join(f"p_{name}" for name in LABELS)]
    for pair, row in zip(test, probs):
        code = int(row.argmax())
        lines.append(
            f"{pair.id},{LABELS[code]},"
            + ",".join(repr(float(p)) for p in row)
        )
    atomic_write_text(job.predictions_path, "\n".join(lines) + "\n")

    metrics = {
        "encoder": enc.name,
        "hyperparameters": {
            "batch_size": job.batch_size,
            "epochs": job.epochs,
            "learning_rate": job.learning_rate,
            "weight_decay": job.weight_decay,
        },
        "seed": job.seed,
        "per_epoch": per_epoch,
    }
    atomic_write_text(job.metrics_path, json.dumps(metrics, indent=2) + "\n")
    return metrics
