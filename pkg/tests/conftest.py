from __future__ import annotations

from importlib import resources
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

from haccuracy.core import Dataset

FIXTURES = Path(str(resources.files("haccuracy") / "fixtures"))

E1_LABELS = ("neg", "pos")
E1_ROWS = [
    ("x1", "neg", (0.9, 0.1)),
    ("x2", "neg", (0.4, 0.6)),
    ("x3", "pos", (0.35, 0.65)),
    ("x4", "pos", (0.7, 0.3)),
]


def make_dataset(labels, rows) -> Dataset:
    ids, truth, scores = zip(*rows)
    return Dataset.from_arrays(labels, truth, np.array(scores, dtype=float), ids=ids)


def random_dataset(rng: np.random.Generator, n: int, k: int, balanced: bool = False) -> Dataset:
    """Simplex scores, every class present (n >= k)."""
    labels = tuple(f"c{i}" for i in range(k))
    if balanced:
        y = np.repeat(np.arange(k), n // k)
    else:
        y = np.concatenate([np.arange(k), rng.integers(0, k, size=n - k)])
    rng.shuffle(y)
    scores = rng.dirichlet(np.ones(k), size=len(y))
    return Dataset.from_arrays(labels, [labels[c] for c in y], scores)


@pytest.fixture
def e1() -> Dataset:
    return make_dataset(E1_LABELS, E1_ROWS)


@st.composite
def datasets(draw, k: int | None = None, min_n: int = 2, max_n: int = 40):
    k = draw(st.sampled_from([2, 3, 5])) if k is None else k
    n = draw(st.integers(max(min_n, k), max(max_n, k)))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_dataset(np.random.default_rng(seed), n, k)
