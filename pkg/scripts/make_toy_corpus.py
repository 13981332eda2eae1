"""Regenerate the bundled toy corpus under src/rhetrel/data/toy/.

Twelve standoff documents of invented cricket reporting, 69 labeled
pairs in total, every relation represented and the counts deliberately
imbalanced (Elaboration 18 down to Joint 3) so the balancing and
splitting walkthroughs in the README have something to do.  Output is
deterministic; rerunning the script leaves the files byte-identical.
"""

from __future__ import annotations

import os
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from rhetrel.corpus import parse_standoff, pairs_from_document, class_histogram
from rhetrel.labels import DEFAULT_LABELS, LabelSet
from rhetrel.rng import SplitMix64

SEED = 2026
PAIRS_PER_DOC = 6

COUNTS = {
    "Elaboration": 18,
    "Background": 12,
    "Contrast": 10,
    "Narration": 8,
    "Concession": 6,
    "Restatement": 5,
    "Cause-Effect": 7,
    "Joint": 3,
}

NAMES = (
    "Marwick",
    "Odanga",
    "Talvela",
    "Brancourt",
    "Ishida",
    "Ferreira",
    "Quiller",
    "Soriano",
)
TEAMS = (
    "Harbourview",
    "the Ridgeway XI",
    "Kestrel Park",
    "the Lowland side",
    "Windmoor",
    "Calder Green",
)
VENUES = (
    "the riverside ground",
    "Alderton Oval",
    "the old quarry ground",
    "Penhale Stadium",
)
RUNS = (34, 47, 52, 61, 68, 73, 81, 96, 104, 118)
SMALL = (3, 4, 5, 6, 7, 8, 9, 11)

TEMPLATES = {
    "Elaboration": (
        (
            "{name} top-scored for {team} with {n}",
            "the knock included {n2} boundaries and a towering six over long-on",
        ),
        (
            "{team} posted {n} for five from their twenty overs",
            "{name} supplied the late impetus with {n2} off just eleven balls",
        ),
        (
            "the selectors recalled {name} for the away leg",
            "the allrounder last featured two seasons ago at {venue}",
        ),
    ),
    "Background": (
        (
            "{name} walked out to a standing reception at {venue}",
            "the veteran had announced this season would be the last",
        ),
        (
            "{team} fielded three debutants in the final",
            "injuries had ruled out half of the first-choice attack",
        ),
        (
            "the covers stayed on until noon at {venue}",
            "rain had soaked the square for two days before the match",
        ),
    ),
    "Contrast": (
        (
            "{name} scored freely square of the wicket",
            "the rest of the order crawled to {n} from eight overs",
        ),
        (
            "{team} dominated the powerplay",
            "their middle overs brought just {n} runs and three wickets",
        ),
        (
            "the forecast promised a full day of play",
            "the umpires abandoned the match at {venue} before tea",
        ),
    ),
    "Narration": (
        (
            "{name} reached the hundred with a scampered single",
            "the declaration came at {n} for six moments later",
        ),
        (
            "{team} sealed the chase with four balls to spare",
            "the players ran a lap of {venue} in front of the members",
        ),
        (
            "the new ball swung for {name} through the first spell",
            "spin took over once the shine wore off",
        ),
    ),
    "Concession": (
        (
            "{team} defended the total comfortably",
            "{name} conceded {n} from the opening two overs",
        ),
        (
            "{name} kept wicket through the full day",
            "a bruised thumb had hampered the gloveman since the warm-up",
        ),
        (
            "the pitch offered little to the quicks",
            "{team} persisted with four seamers all afternoon",
        ),
    ),
    "Restatement": (
        (
            "{team} were bundled out for {n} inside thirty overs",
            "the whole innings lasted barely half the allotted time",
        ),
        (
            "{name} finished with figures of five for {n}",
            "a five-wicket haul rounded off the spell",
        ),
        (
            "the decider at {venue} ended without a ball bowled",
            "no play proved possible on the final day",
        ),
    ),
    "Cause-Effect": (
        (
            "a burst water main flooded the outfield at {venue}",
            "the toss was delayed by two hours",
        ),
        (
            "{name} overstepped on the decisive delivery",
            "the reprieved batter added another {n} runs",
        ),
        (
            "{team} burned all three reviews inside ten overs",
            "the captain had none left for the crucial appeal",
        ),
    ),
    "Joint": (
        (
            "{name} was named player of the match",
            "{team} climbed to second on the table",
        ),
        (
            "the gates opened an hour early at {venue}",
            "the club launched its membership drive on the concourse",
        ),
        (
            "{name} passed a thousand runs for the season",
            "the bowlers shared ninety wickets between them",
        ),
    ),
}


def _sentence(template: str, slots: dict) -> str:
    text = template.format(**slots)
    return text[0].upper() + text[1:] + "."


def make_pairs() -> list[tuple[str, str, str]]:
    labels = [label for label in DEFAULT_LABELS for _ in range(COUNTS[label])]
    rng = SplitMix64(SEED)
    rng.shuffle(labels)
    label_set = LabelSet()
    used = {label: 0 for label in DEFAULT_LABELS}
    pairs = []
    for label in labels:
        templates = TEMPLATES[label]
        k = used[label]
        used[label] += 1
        template = templates[k % len(templates)]
        # Slots rotate with the per-template reuse count, so repeated
        # uses of one template never yield identical sentences.
        reuse = k // len(templates)
        code = label_set.code(label)
        slots = {
            "name": NAMES[(reuse + code) % len(NAMES)],
            "team": TEAMS[(reuse + code) % len(TEAMS)],
            "venue": VENUES[(reuse + code) % len(VENUES)],
            "n": RUNS[(reuse + 2 * code) % len(RUNS)],
            "n2": SMALL[(reuse + code) % len(SMALL)],
        }
        pairs.append((_sentence(template[0], slots), _sentence(template[1], slots), label))
    if len(set(pairs)) != len(pairs):
        raise SystemExit("slot rotation produced duplicate pairs")
    return pairs


def render_doc(doc_id: str, doc_pairs: list[tuple[str, str, str]]) -> str:
    edus = []
    for edu1, edu2, _ in doc_pairs:
        edus.extend([edu1, edu2])
    text = " ".join(edus)
    offsets = []
    cursor = 0
    for edu in edus:
        start = cursor
        end = start + len(edu)
        assert text[start:end] == edu
        offsets.append((start, end))
        cursor = end + 1
    lines = [f"#DOC {doc_id}", f"#TEXT {text}"]
    for i, (start, end) in enumerate(offsets, start=1):
        lines.append(f"SPAN s{i} {start} {end}")
    for i, (_, _, label) in enumerate(doc_pairs):
        lines.append(f"REL s{2 * i + 1} s{2 * i + 2} {label}")
    return "\n".join(lines) + "\n"


def main() -> int:
    out_dir = Path(__file__).resolve().parents[1] / "src" / "rhetrel" / "data" / "toy"
    os.makedirs(out_dir, exist_ok=True)
    pairs = make_pairs()
    docs = [
        pairs[i : i + PAIRS_PER_DOC] for i in range(0, len(pairs), PAIRS_PER_DOC)
    ]
    label_set = LabelSet()
    all_pairs = []
    for i, doc_pairs in enumerate(docs, start=1):
        doc_id = f"toy-{i:03d}"
        content = render_doc(doc_id, doc_pairs)
        parsed = parse_standoff(content, label_set)
        reread = pairs_from_document(parsed)
        expected = [(p[0], p[1], p[2]) for p in doc_pairs]
        got = [(p.edu1, p.edu2, p.label) for p in reread]
        if got != expected:
            raise SystemExit(f"{doc_id}: reparse mismatch")
        all_pairs.extend(reread)
        (out_dir / f"{doc_id}.rsta").write_bytes(content.encode("utf-8"))
    hist = class_histogram(all_pairs, label_set)
    if hist != COUNTS:
        raise SystemExit(f"histogram drifted: {hist}")
    print(f"wrote {len(docs)} documents, {len(all_pairs)} pairs -> {out_dir}")
    for label, count in hist.items():
        print(f"  {label}: {count}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
