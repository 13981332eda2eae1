"""Synthetic separable corpora: each class owns a disjoint keyword pool,
so any encoder that distinguishes tokens can separate the classes."""

from rhetembed.pairs import LABELS


def _pool(label: str) -> list[str]:
    stem = label.lower().replace("-", "")
    return [f"{stem}{i}" for i in range(6)]


def split_rows(per_class: int, phase: int = 0) -> list[str]:
    """CSV data rows, per_class pairs per label; phase varies the wording."""
    rows = []
    for label in LABELS:
        words = _pool(label)
        for j in range(per_class):
            edu1 = " ".join(words[:3])
            edu2 = " ".join([words[3], words[3 + (j + phase) % 3]])
            rows.append(f"{edu1},{edu2},{label}")
    return rows


def write_split(path, per_class: int, phase: int = 0) -> None:
    content = "EDU1,EDU2,Label\n" + "\n".join(split_rows(per_class, phase)) + "\n"
    path.write_text(content, encoding="utf-8")
