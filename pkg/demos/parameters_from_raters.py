"""Deriving tau, priorities and complexity from a simulated reader study.

Three simulated readers label 60 cases with a confidence and a complexity
rating on 1..4 scales. The script writes the annotation CSV, elicits the
parameters, and compares plain accuracies with the resulting H-accuracy.
"""

import csv
import tempfile
from pathlib import Path

import numpy as np

from haccuracy.core import Dataset
from haccuracy.elicitation import (
    aggregate_complexity,
    derive_priorities_from_raters,
    derive_tau_from_confidence,
    quantile_thresholds,
    rater_performances,
    two_level_complexity,
)
from haccuracy.formats import gold_from_dataset, parse_annotations
from haccuracy.metrics import HaParams, balanced_accuracy, h_accuracy, regular_accuracy

SCALE = 4


def simulate(n=60, seed=2):
    rng = np.random.default_rng(seed)
    y = np.tile([0, 1], n // 2)
    difficulty = rng.integers(1, SCALE + 1, n)
    # the model struggles on difficult cases
    margin = 0.45 - 0.1 * difficulty + rng.normal(0, 0.15, n)
    p_true = np.clip(0.5 + margin, 0.01, 0.99)
    p_pos = np.where(y == 1, p_true, 1 - p_true)
    ds = Dataset.from_arrays(("neg", "pos"), y, np.column_stack([1 - p_pos, p_pos]),
                             ids=[f"case{i:02d}" for i in range(n)])
    rows = []
    for rater, skill in (("r1", 0.9), ("r2", 0.8), ("r3", 0.7)):
        for i, x in enumerate(ds.instances):
            correct = rng.uniform() < skill - 0.05 * difficulty[i]
            wrong = "neg" if x.true_label == "pos" else "pos"
            label = x.true_label if correct else wrong
            conf = int(np.clip(SCALE + 1 - difficulty[i] + rng.integers(-1, 2), 1, SCALE))
            cplx = int(np.clip(difficulty[i] + rng.integers(-1, 2), 1, SCALE))
            rows.append((rater, x.id, "finding", label, conf, cplx))
    return ds, rows


if __name__ == "__main__":
    ds, rows = simulate()
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "annotations.csv"
        with path.open("w", newline="") as f:
            f.write(f"#scales confidence={SCALE} complexity={SCALE}\n")
            writer = csv.writer(f)
            writer.writerow(["rater_id", "instance_id", "decision", "assigned_label",
                             "confidence", "complexity"])
            writer.writerows(rows)
        annotations = parse_annotations(path, gold_from_dataset(ds))

    perf = rater_performances(annotations, "pos")
    for r in perf:
        print(f"{r.rater_id}: TPR {r.tpr:.3f}  TNR {r.tnr:.3f}")
    priorities = derive_priorities_from_raters(perf, ds.label_set)
    tau = derive_tau_from_confidence(annotations, r=0.5)
    profile = aggregate_complexity(annotations)
    thresholds = quantile_thresholds(profile)
    complexity = two_level_complexity(profile, thresholds[0])
    print("priorities", {k: round(v, 4) for k, v in priorities.weights.items()})
    print("tau", tau, " complexity thresholds (50/33/20%)", thresholds)

    print(f"\naccuracy {regular_accuracy(ds):.4f}  balanced {balanced_accuracy(ds):.4f}")
    print(f"H-accuracy {h_accuracy(ds, HaParams(tau, priorities, complexity)):.4f}")
