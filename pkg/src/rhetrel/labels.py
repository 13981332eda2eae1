"""The fixed inventory of rhetorical relations and its integer coding."""

from __future__ import annotations

import difflib
from dataclasses import dataclass, field

from rhetrel.errors import UnknownLabel

DEFAULT_LABELS = (
    "Elaboration",
    "Background",
    "Contrast",
    "Narration",
    "Concession",
    "Restatement",
    "Cause-Effect",
    "Joint",
)

# Spelling variants accepted on ingest, lowercased form -> canonical name.
_ALIASES = {
    "re-statement": "Restatement",
}


@dataclass(frozen=True)
class LabelSet:
    """Ordered relation inventory; position in ``labels`` is the class code."""

    labels: tuple[str, ...] = DEFAULT_LABELS
    codes: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        if not self.labels:
            raise ValueError("label set must not be empty")
        if any(not name for name in self.labels):
            raise ValueError("label names must be non-empty")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("label names must be unique")
        object.__setattr__(
            self, "codes", {name: code for code, name in enumerate(self.labels)}
        )

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, name: str) -> bool:
        return name in self.codes

    def code(self, name: str) -> int:
        try:
            return self.codes[name]
        except KeyError:
            raise self.unknown(name) from None

    def name(self, code: int) -> str:
        return self.labels[code]

    def normalize(
        self, name: str, location: int | None = None, kind: str = "row"
    ) -> str:
        """Map an ingest spelling to its canonical label name.

        Accepts canonical names, case-insensitive matches, and the
        listed spelling variants.  Raises UnknownLabel (with the nearest
        valid name as a suggestion) for anything else.
        """
        stripped = name.strip()
        if stripped in self.codes:
            return stripped
        lowered = stripped.lower()
        if lowered in _ALIASES and _ALIASES[lowered] in self.codes:
            return _ALIASES[lowered]
        for canonical in self.labels:
            if canonical.lower() == lowered:
                return canonical
        raise self.unknown(stripped, location, kind)

    def unknown(
        self, name: str, location: int | None = None, kind: str = "row"
    ) -> UnknownLabel:
        nearest = difflib.get_close_matches(name, self.labels, n=1, cutoff=0.0)
        hint = f" (nearest valid label: {nearest[0]!r})" if nearest else ""
        return UnknownLabel(f"unknown label {name!r}{hint}", location, kind)
