"""Integer label encoding, seeded stratified splitting, and oversampling.

Both randomized operations draw from one SplitMix64 stream seeded by
the caller and walk classes in ascending code order, so results are
reproducible bit-for-bit from (input, parameters, seed):

* split — per class, the items (in dataset order) are Fisher-Yates
  shuffled with the stream, the first floor(r_train * n_c) go to train,
  the next floor(r_val * n_c) to validation, the remainder to test;
  each part is then sorted by item id.  Products r * n_c within 1e-9 of
  an integer are snapped to it before flooring.
* oversample — per class below the target, (target - count) draws with
  replacement from the class's items in dataset order; the duplicates
  are appended after all originals with fresh sequential ids that
  record their source item.  Classes at or above the target are never
  touched, and no item is ever removed.
"""

from __future__ import annotations

from dataclasses import dataclass

from rhetrel.corpus import LabeledPair
from rhetrel.errors import DatasetError, EmptyClass
from rhetrel.labels import LabelSet
from rhetrel.rng import SplitMix64

_SNAP_EPS = 1e-9


@dataclass(frozen=True)
class EncodedItem:
    """One record: texts plus the integer class code.

    ``source_id`` is None for original records; oversampled duplicates
    carry the id of the item they copy.
    """

    id: int
    edu1: str
    edu2: str
    y: int
    source_id: int | None = None


@dataclass(frozen=True)
class EncodedDataset:
    items: tuple[EncodedItem, ...]
    label_set: LabelSet

    def __post_init__(self):
        ids = [item.id for item in self.items]
        if len(set(ids)) != len(ids):
            raise DatasetError("item ids must be unique")
        k = len(self.label_set)
        for item in self.items:
            if not 0 <= item.y < k:
                raise DatasetError(f"class code {item.y} outside 0..{k - 1}")

    def __len__(self) -> int:
        return len(self.items)

    def class_counts(self) -> dict[str, int]:
        counts = {name: 0 for name in self.label_set.labels}
        for item in self.items:
            counts[self.label_set.name(item.y)] += 1
        return counts

    def pairs(self) -> list[LabeledPair]:
        return [
            LabeledPair(item.edu1, item.edu2, self.label_set.name(item.y))
            for item in self.items
        ]


@dataclass(frozen=True)
class SplitDataset:
    train: EncodedDataset
    validation: EncodedDataset
    test: EncodedDataset
    ratios: tuple[float, float, float]
    seed: int

    def parts(self) -> dict[str, EncodedDataset]:
        return {
            "train": self.train,
            "validation": self.validation,
            "test": self.test,
        }


def encode_labels(pairs: list[LabeledPair], label_set: LabelSet) -> EncodedDataset:
    """Encode labels to class codes; ids are dense 0..n-1 in input order."""
    items = tuple(
        EncodedItem(i, pair.edu1, pair.edu2, label_set.code(pair.label))
        for i, pair in enumerate(pairs)
    )
    return EncodedDataset(items, label_set)


def _validate_ratios(ratios: tuple[float, float, float]) -> None:
    if len(ratios) != 3:
        raise DatasetError("ratios must be a (train, validation, test) triple")
    if any(r <= 0 for r in ratios):
        raise DatasetError("ratios must be positive")
    if abs(sum(ratios) - 1.0) > _SNAP_EPS:
        raise DatasetError(f"ratios must sum to 1, got {sum(ratios)!r}")


def _floor_share(ratio: float, n: int) -> int:
    product = ratio * n
    nearest = round(product)
    if abs(product - nearest) < _SNAP_EPS:
        return int(nearest)
    return int(product)


def stratified_split(
    ds: EncodedDataset,
    ratios: tuple[float, float, float] = (0.6, 0.2, 0.2),
    seed: int = 0,
    strict: bool = True,
) -> SplitDataset:
    """Seeded per-class split into train/validation/test.

    With ``strict`` on, a label with zero items raises EmptyClass;
    otherwise empty classes simply contribute nothing.
    """
    _validate_ratios(ratios)
    by_class: dict[int, list[EncodedItem]] = {
        code: [] for code in range(len(ds.label_set))
    }
    for item in ds.items:
        by_class[item.y].append(item)

    rng = SplitMix64(seed)
    train: list[EncodedItem] = []
    validation: list[EncodedItem] = []
    test: list[EncodedItem] = []
    for code in range(len(ds.label_set)):
        members = by_class[code]
        if not members:
            if strict:
                raise EmptyClass(ds.label_set.name(code))
            continue
        rng.shuffle(members)
        n_c = len(members)
        n_train = _floor_share(ratios[0], n_c)
        n_val = _floor_share(ratios[1], n_c)
        train.extend(members[:n_train])
        validation.extend(members[n_train : n_train + n_val])
        test.extend(members[n_train + n_val :])

    def as_part(items: list[EncodedItem]) -> EncodedDataset:
        return EncodedDataset(
            tuple(sorted(items, key=lambda item: item.id)), ds.label_set
        )

    return SplitDataset(
        train=as_part(train),
        validation=as_part(validation),
        test=as_part(test),
        ratios=tuple(ratios),
        seed=seed,
    )


def oversample(ds: EncodedDataset, target: int, seed: int = 0) -> EncodedDataset:
    """Pad every class below ``target`` by seeded duplication.

    The output keeps every input item untouched (same ids, same order)
    and appends the duplicates; each duplicate gets a fresh id and
    records the id of the item it copies.
    """
    if target < 1:
        raise DatasetError("target count must be at least 1")
    by_class: dict[int, list[EncodedItem]] = {
        code: [] for code in range(len(ds.label_set))
    }
    for item in ds.items:
        by_class[item.y].append(item)

    rng = SplitMix64(seed)
    next_id = max((item.id for item in ds.items), default=-1) + 1
    added: list[EncodedItem] = []
    for code in range(len(ds.label_set)):
        members = by_class[code]
        deficit = target - len(members)
        if deficit <= 0:
            continue
        if not members:
            raise EmptyClass(ds.label_set.name(code))
        for pick in rng.sample_with_replacement(len(members), deficit):
            source = members[pick]
            added.append(
                EncodedItem(
                    id=next_id,
                    edu1=source.edu1,
                    edu2=source.edu2,
                    y=source.y,
                    source_id=source.id,
                )
            )
            next_id += 1
    return EncodedDataset(ds.items + tuple(added), ds.label_set)
