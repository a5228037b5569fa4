"""Regenerate the bundled fixtures and their oracle values.

Run from the repository root::

    python tools/make_fixtures.py [output-dir]

Scores are drawn on a 0.01 grid so the CSV text is exact and the oracle can
work in rationals. Expected values come from ``tests/oracle.py`` only.
"""

import json
import random
import sys
from fractions import Fraction
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

import oracle  # noqa: E402

FIXTURES = ROOT / "src" / "haccuracy" / "fixtures"

E1 = [
    ("x1", "neg", ("0.9", "0.1")),
    ("x2", "neg", ("0.4", "0.6")),
    ("x3", "pos", ("0.35", "0.65")),
    ("x4", "pos", ("0.7", "0.3")),
]

LABELS = ("a", "b", "c")
TAUS = ("0.5", "0.6", "0.75", "0.8", "1")
PRIORITIES = {"a": "0.2", "b": "0.3", "c": "0.5"}


def write_predictions(path, labels, rows):
    lines = ["instance_id,true_label," + ",".join(f"score:{l}" for l in labels)]
    for rid, y, scores in rows:
        lines.append(",".join([rid, y, *scores]))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def synthetic_rows(seed=20240601, n=60):
    rng = random.Random(seed)
    rows = []
    for i in range(n):
        y = LABELS[i % 3]
        cuts = sorted(rng.sample(range(1, 100), 2))
        parts = [cuts[0], cuts[1] - cuts[0], 100 - cuts[1]]
        # bias towards the true class so accuracy is informative
        if rng.random() < 0.6:
            yi = LABELS.index(y)
            top = max(range(3), key=lambda j: parts[j])
            parts[yi], parts[top] = parts[top], parts[yi]
        rows.append((f"s{i:02d}", y, tuple(f"{p / 100:.2f}" for p in parts)))
    complexity = {r[0]: rng.choice(["0.25", "0.5", "0.75", "1"]) for r in rows}
    return rows, complexity


def as_entry(value):
    value = Fraction(value)
    return {"exact": f"{value.numerator}/{value.denominator}", "value": float(value)}


def main(out=FIXTURES):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    write_predictions(out / "e1.csv", ("neg", "pos"), E1)

    rows, complexity = synthetic_rows()
    write_predictions(out / "synthetic60.csv", LABELS, rows)
    (out / "synthetic60_complexity.csv").write_text(
        "instance_id,complexity\n"
        + "".join(f"{rid},{complexity[rid]}\n" for rid, _, _ in rows),
        encoding="utf-8",
    )

    uniform = {l: Fraction(1, 3) for l in LABELS}
    const = {r[0]: 1 for r in rows}
    chance = Fraction(1, 3)
    values = {
        "regular_accuracy": oracle.regular_accuracy(rows, LABELS),
        "balanced_accuracy": oracle.balanced_accuracy(rows, LABELS),
        "prioritized_accuracy": oracle.h_accuracy(rows, LABELS, chance, PRIORITIES, const),
        "practical_accuracy": oracle.h_accuracy(rows, LABELS, chance, uniform, complexity),
        "h_accuracy_full": oracle.h_accuracy(rows, LABELS, "0.75", PRIORITIES, complexity),
    }
    for tau in TAUS:
        values[f"confident_accuracy@{tau}"] = oracle.h_accuracy(rows, LABELS, tau, uniform, const)
    document = {
        "labels": list(LABELS),
        "priorities": PRIORITIES,
        "full_tau": "0.75",
        "values": {name: as_entry(v) for name, v in sorted(values.items())},
    }
    (out / "synthetic60_oracle.json").write_text(
        json.dumps(document, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


if __name__ == "__main__":
    main(*sys.argv[1:2])
