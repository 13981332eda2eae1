"""Transformer companion for the rhetorical-relation pipeline.

Produces the pipeline's external artifacts that need a neural encoder:
frozen-encoder embeddings for every EDU pair (one 768-component vector
per pair, written as embedding JSONL) and fine-tuned classifier outputs
(per-epoch metrics JSON plus a test-set predictions CSV). It consumes
and emits only the pipeline's documented file formats.
"""

__version__ = "0.1.0"

from rhetembed.extract import EmbedJob, extract_embeddings
from rhetembed.finetune import FinetuneJob, finetune_and_predict
from rhetembed.pairs import LABELS, Pair, read_pairs

__all__ = [
    "EmbedJob",
    "extract_embeddings",
    "FinetuneJob",
    "finetune_and_predict",
    "LABELS",
    "Pair",
    "read_pairs",
    "__version__",
]
