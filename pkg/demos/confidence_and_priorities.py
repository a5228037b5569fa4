"""How the confidence threshold and class priorities reshape accuracy.

Runs on the bundled 4-case fixture and on a simulated screening model whose
positives are harder to detect than its negatives.
"""

from importlib import resources

import numpy as np

from haccuracy.analysis import priority_sweep, tau_sweep
from haccuracy.core import Dataset
from haccuracy.formats import parse_predictions
from haccuracy.metrics import balanced_accuracy, regular_accuracy


def screening_model(n=400, prevalence=0.2, seed=0):
    rng = np.random.default_rng(seed)
    y = (rng.uniform(size=n) < prevalence).astype(int)
    # positives: wide, less confident scores; negatives: confident
    p_pos = np.where(y == 1, rng.beta(3, 2, n), rng.beta(1, 6, n))
    return Dataset.from_arrays(("neg", "pos"), y, np.column_stack([1 - p_pos, p_pos]))


def show(table):
    name = table.axis_names[0]
    for (x,), (v,) in table.rows:
        print(f"  {name}={x:<5g} {table.value_names[0]}={v:.4f}")


if __name__ == "__main__":
    e1 = parse_predictions(resources.files("haccuracy") / "fixtures" / "e1.csv")
    print("fixture E1: accuracy", regular_accuracy(e1), "balanced", balanced_accuracy(e1))
    show(tau_sweep(e1, [0.5, 0.6, 0.75, 0.8, 1.0]))

    model = screening_model()
    print(f"\nscreening model: accuracy {regular_accuracy(model):.4f}, "
          f"balanced {balanced_accuracy(model):.4f}")
    print("demanding more confidence removes credit from hesitant hits:")
    show(tau_sweep(model, [0.5, 0.6, 0.75, 0.8, 0.9, 1.0]))
    print("weighting sensitivity vs specificity moves the score linearly:")
    show(priority_sweep(model, [0.0, 0.25, 0.5, 0.75, 1.0]))
