"""Parameter sweeps and the confusion-matrix invariance harness.

Sweeps return :class:`SweepTable` objects whose rows are sorted by parameter
point. The randomized complexity surface draws every grid point from its own
PCG64 stream seeded with ``SeedSequence([seed, point_index])``, so serial and
parallel evaluation give identical tables.

The invariance harness evaluates a confusion-matrix metric before and after
one of the eight transformations I1..I8 on random matrices, and reports the
first mismatch it finds.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .core import ComplexityAssignment, ConfusionMatrix, Dataset, PriorityVector
from .errors import NegativeCell, ParameterError
from .metrics import (
    HaParams,
    accuracy_from_confusion,
    confident_accuracy,
    h_accuracy,
    ha_from_confusion,
    net_benefit_via_ha,
    prevalence,
    prioritized_accuracy,
    risk_priorities,
    weighted_class_average,
)
from .penalty import standard_values

RNG_ALGORITHM = f"numpy.random.PCG64 via SeedSequence([seed, point]) (numpy {np.__version__})"
SIMPLE_CASE_WEIGHT = 0.5


@dataclass(frozen=True)
class SweepTable:
    name: str
    axis_names: tuple[str, ...]
    value_names: tuple[str, ...]
    rows: tuple[tuple[tuple[float, ...], tuple[float, ...]], ...]
    meta: dict = field(default_factory=dict, compare=False)

    def column(self, name: str) -> list[float]:
        if name in self.axis_names:
            i = self.axis_names.index(name)
            return [point[i] for point, _ in self.rows]
        i = self.value_names.index(name)
        return [values[i] for _, values in self.rows]


def _sorted_unique(values: Sequence[float]) -> list[float]:
    return sorted({float(v) for v in values})


def tau_sweep(dataset: Dataset, taus: Sequence[float]) -> SweepTable:
    rows = tuple(((t,), (confident_accuracy(dataset, t),)) for t in _sorted_unique(taus))
    return SweepTable("tau", ("tau",), ("confident_accuracy",), rows)


def priority_sweep(dataset: Dataset, positive_priorities: Sequence[float]) -> SweepTable:
    dataset.require_binary()
    rows = []
    for p1 in _sorted_unique(positive_priorities):
        if not 0.0 <= p1 <= 1.0:
            raise ParameterError(f"priority {p1!r} outside [0, 1]")
        value = prioritized_accuracy(dataset, PriorityVector.binary(p1, dataset.label_set))
        rows.append(((p1,), (value,)))
    return SweepTable("priority", ("p_positive",), ("prioritized_accuracy",), tuple(rows))


def point_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, index])))


def complex_subset_size(q: float, n: int) -> int:
    # nudge so e.g. 0.29 * 100 lands on 29, not 28
    return min(n, int(math.floor(q * n + 1e-9)))


def _surface_point(dataset: Dataset, sigma: np.ndarray, q: float, p1: float, samples: int,
                   seed: int, index: int) -> tuple[float, float]:
    n = len(dataset)
    m = complex_subset_size(q, n)
    rng = point_rng(seed, index)
    priorities = np.array([1.0 - p1, p1]) if dataset.k == 2 else None
    if priorities is None:
        raise ParameterError("the complexity surface is defined over binary priorities")
    values = []
    for _ in range(samples):
        d = np.full(n, SIMPLE_CASE_WEIGHT)
        if 0 < m < n:
            d[rng.choice(n, size=m, replace=False)] = 1.0
        elif m == n:
            d[:] = 1.0
        values.append(weighted_class_average(dataset.y, sigma, d, priorities,
                                             dataset.label_set.labels))
    # offset from the first draw so identical draws give that value exactly
    mean = values[0] + math.fsum(v - values[0] for v in values) / samples
    if samples > 1:
        std = math.sqrt(math.fsum((v - mean) ** 2 for v in values) / (samples - 1))
    else:
        std = 0.0
    return mean, std


def complexity_surface(dataset: Dataset, proportions: Sequence[float], priorities: Sequence[float],
                       samples_per_point: int = 200, seed: int = 0, workers: int = 1
                       ) -> SweepTable:
    """Mean H-accuracy over random complexity assignments on a grid.

    At each ``(q, p1)`` point, ``floor(q n)`` instances drawn without
    replacement get complexity 1 and the rest 1/2; H-accuracy is taken at
    chance-level tau with priorities ``<1 - p1, p1>``. The table holds the
    mean and sample standard deviation over ``samples_per_point`` draws.
    """
    dataset.require_binary()
    dataset.require_all_classes()
    if samples_per_point < 1:
        raise ParameterError("samples_per_point must be >= 1")
    qs, ps = _sorted_unique(proportions), _sorted_unique(priorities)
    for v in (*qs, *ps):
        if not 0.0 <= v <= 1.0:
            raise ParameterError(f"grid value {v!r} outside [0, 1]")
    sigma = standard_values(dataset.scores, dataset.y, 1.0 / dataset.k)
    grid = [(q, p1) for q in qs for p1 in ps]

    def run(item):
        index, (q, p1) = item
        return _surface_point(dataset, sigma, q, p1, samples_per_point, seed, index)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, enumerate(grid)))
    else:
        results = [run(item) for item in enumerate(grid)]
    rows = tuple((point, values) for point, values in zip(grid, results))
    meta = {"seed": seed, "samples_per_point": samples_per_point, "rng": RNG_ALGORITHM,
            "simple_case_weight": SIMPLE_CASE_WEIGHT}
    return SweepTable("surface", ("complex_fraction", "p_positive"), ("ha_mean", "ha_std"),
                      rows, meta)


def nb_ha_curves(dataset: Dataset, taus: Sequence[float]) -> SweepTable:
    """Net Benefit, standardized Net Benefit, confident accuracy and
    risk-penalized H-accuracy across risk thresholds.

    Confident accuracy is only defined from chance level upwards; below it
    the penalty's branches reduce to the argmax indicator, so the column
    carries the chance-level value there.
    """
    dataset.require_binary()
    pi = prevalence(dataset)
    chance = 1.0 / dataset.k
    rows = []
    for tau in _sorted_unique(taus):
        nb = net_benefit_via_ha(dataset, tau)
        priorities, _ = risk_priorities(tau, pi, dataset.label_set)
        ha_risk = h_accuracy(dataset, HaParams(tau, priorities, ComplexityAssignment.const(),
                                               "risk"))
        conf = confident_accuracy(dataset, max(tau, chance))
        rows.append(((tau,), (nb, nb / pi, conf, ha_risk)))
    return SweepTable("nbha", ("tau",), ("net_benefit", "standardized_net_benefit",
                                         "confident_accuracy", "ha_risk"), tuple(rows))


# --- confusion-matrix invariance -------------------------------------------

TransformKind = Literal["class-swap", "add-tn", "add-tp", "add-fn", "add-fp",
                        "uniform-scale", "column-scale", "row-scale"]

PROPERTY_OF_KIND = {
    "class-swap": "I1", "add-tn": "I2", "add-tp": "I3", "add-fn": "I4", "add-fp": "I5",
    "uniform-scale": "I6", "column-scale": "I7", "row-scale": "I8",
}
_ADDITIVE = {"add-tn": "tn", "add-tp": "tp", "add-fn": "fn", "add-fp": "fp"}


@dataclass(frozen=True)
class CmTransform:
    """A confusion-matrix transformation.

    Cells are laid out as ``[[tp, fn], [fp, tn]]``: the row scale multiplies
    ``(tp, fn)`` by ``params[0]`` and ``(fp, tn)`` by ``params[1]``; the
    column scale multiplies ``(tp, fp)`` by ``params[0]`` and ``(fn, tn)`` by
    ``params[1]``. Additive kinds take a single delta, uniform scale a single
    factor, class swap nothing.
    """

    kind: TransformKind
    params: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        expected = {"class-swap": 0, "uniform-scale": 1, "row-scale": 2, "column-scale": 2}
        arity = 1 if self.kind in _ADDITIVE else expected.get(self.kind)
        if arity is None:
            raise ParameterError(f"unknown transform {self.kind!r}")
        if len(self.params) != arity:
            raise ParameterError(f"{self.kind} takes {arity} parameter(s), got {self.params}")
        if self.kind.endswith("scale"):
            if any(p <= 0 for p in self.params):
                raise ParameterError("scale factors must be > 0")
            if len(self.params) == 2 and self.params[0] == self.params[1]:
                raise ParameterError("row/column scaling needs two different factors")

    @property
    def property_name(self) -> str:
        return PROPERTY_OF_KIND[self.kind]


def apply_cm_transform(cm: ConfusionMatrix, t: CmTransform) -> ConfusionMatrix:
    tp, fn, fp, tn = cm.cells()
    if t.kind == "class-swap":
        tp, fn, fp, tn = tn, fp, fn, tp
    elif t.kind in _ADDITIVE:
        cells = {"tp": tp, "fn": fn, "fp": fp, "tn": tn}
        cells[_ADDITIVE[t.kind]] += t.params[0]
        tp, fn, fp, tn = cells["tp"], cells["fn"], cells["fp"], cells["tn"]
    elif t.kind == "uniform-scale":
        k = t.params[0]
        tp, fn, fp, tn = k * tp, k * fn, k * fp, k * tn
    elif t.kind == "row-scale":
        k1, k2 = t.params
        tp, fn, fp, tn = k1 * tp, k1 * fn, k2 * fp, k2 * tn
    elif t.kind == "column-scale":
        k1, k2 = t.params
        tp, fn, fp, tn = k1 * tp, k2 * fn, k1 * fp, k2 * tn
    if min(tp, fn, fp, tn) < 0:
        raise NegativeCell(f"{t.kind} {t.params} drives a cell below zero")
    return ConfusionMatrix.binary(tp, fn, fp, tn, cm.label_set)


@dataclass(frozen=True)
class CmMetric:
    """A metric computable from a binary confusion matrix alone."""

    name: str
    fn: Callable[[ConfusionMatrix], float]

    def __call__(self, cm: ConfusionMatrix) -> float:
        return self.fn(cm)


def prioritized_cm_metric(p_positive: float) -> CmMetric:
    """Prioritized H-accuracy (tau = 1/2, constant complexity)."""
    def fn(cm):
        return ha_from_confusion(cm, PriorityVector.binary(p_positive, cm.label_set))
    return CmMetric(f"Ha(p1={p_positive:g})", fn)


def prevalence_weighted_cm_metric() -> CmMetric:
    """Prioritized H-accuracy with priorities equal to the class shares of
    the matrix being scored, so a class swap swaps the priorities too."""
    def fn(cm):
        p1 = (cm.tp + cm.fn) / cm.total
        return ha_from_confusion(cm, PriorityVector.binary(p1, cm.label_set))
    return CmMetric("Ha(p=prevalence)", fn)


@dataclass(frozen=True)
class InvarianceVerdict:
    metric: str
    transform: str
    property_name: str
    invariant: bool
    trials: int
    counterexample: tuple[ConfusionMatrix, ConfusionMatrix, float, float] | None = None
    transform_params: tuple[float, ...] | None = None


def random_confusion(rng: np.random.Generator, low: int = 1, high: int = 1000) -> ConfusionMatrix:
    tp, fn, fp, tn = rng.integers(low, high, size=4, endpoint=True).astype(float)
    return ConfusionMatrix.binary(tp, fn, fp, tn)


def random_transform(kind: str, rng: np.random.Generator) -> CmTransform:
    if kind == "class-swap":
        return CmTransform(kind)
    if kind in _ADDITIVE:
        return CmTransform(kind, (float(rng.integers(1, 1000, endpoint=True)),))
    if kind == "uniform-scale":
        return CmTransform(kind, (float(rng.uniform(0.1, 10.0)),))
    while True:
        k1, k2 = rng.uniform(0.1, 10.0, size=2)
        if k1 != k2:
            return CmTransform(kind, (float(k1), float(k2)))


def check_invariance(metric: CmMetric, t: CmTransform | str, trials: int = 1000, seed: int = 0,
                     tolerance: float = 1e-12) -> InvarianceVerdict:
    """Compare ``metric`` before and after ``t`` on ``trials`` random
    matrices with every cell >= 1. Passing a transform kind instead of a
    :class:`CmTransform` draws fresh transform parameters on every trial."""
    kind = t if isinstance(t, str) else t.kind
    rng = np.random.Generator(np.random.PCG64(seed))
    for _ in range(trials):
        cm = random_confusion(rng)
        transform = random_transform(kind, rng) if isinstance(t, str) else t
        moved = apply_cm_transform(cm, transform)
        before, after = metric(cm), metric(moved)
        if abs(before - after) > tolerance:
            return InvarianceVerdict(metric.name, kind, PROPERTY_OF_KIND[kind], False, trials,
                                     (cm, moved, before, after), transform.params)
    return InvarianceVerdict(metric.name, kind, PROPERTY_OF_KIND[kind], True, trials)


@dataclass(frozen=True)
class InvarianceCase:
    metric: CmMetric
    kind: str
    expect_invariant: bool


def invariance_suite() -> list[InvarianceCase]:
    """The claimed invariance results, each with its expected verdict."""
    only_pos = prioritized_cm_metric(1.0)
    only_neg = prioritized_cm_metric(0.0)
    cases = [InvarianceCase(prioritized_cm_metric(p), "uniform-scale", True)
             for p in (0.0, 0.25, 0.5, 0.75, 1.0)]
    cases.append(InvarianceCase(prevalence_weighted_cm_metric(), "class-swap", True))
    cases += [InvarianceCase(only_pos, k, True) for k in ("add-tn", "add-fp", "row-scale")]
    cases += [InvarianceCase(only_neg, k, True) for k in ("add-tp", "add-fn", "row-scale")]
    cases.append(InvarianceCase(prioritized_cm_metric(0.5), "column-scale", False))
    return cases


def run_invariance_suite(trials: int = 1000, seed: int = 0) -> list[tuple[InvarianceCase,
                                                                         InvarianceVerdict]]:
    return [(case, check_invariance(case.metric, case.kind, trials, seed))
            for case in invariance_suite()]


# Hand-checked witness pairs on (tp, fn, fp, tn) = (1, 2, 3, 4), where the
# positive recall is 1/3 and the negative recall 4/7.
_BASE = (1.0, 2.0, 3.0, 4.0)
WITNESSES = [
    # (metric, transform, base cells, transformed cells, value before, value after)
    (prioritized_cm_metric(0.75), CmTransform("uniform-scale", (3,)), _BASE,
     (3.0, 6.0, 9.0, 12.0), 11 / 28, 11 / 28),
    (prevalence_weighted_cm_metric(), CmTransform("class-swap"), _BASE,
     (4.0, 3.0, 2.0, 1.0), 0.5, 0.5),
    (prioritized_cm_metric(1.0), CmTransform("add-tn", (5,)), _BASE, (1.0, 2.0, 3.0, 9.0),
     1 / 3, 1 / 3),
    (prioritized_cm_metric(1.0), CmTransform("add-fp", (5,)), _BASE, (1.0, 2.0, 8.0, 4.0),
     1 / 3, 1 / 3),
    (prioritized_cm_metric(1.0), CmTransform("row-scale", (2, 1)), _BASE, (2.0, 4.0, 3.0, 4.0),
     1 / 3, 1 / 3),
    (prioritized_cm_metric(0.0), CmTransform("add-tp", (5,)), _BASE, (6.0, 2.0, 3.0, 4.0),
     4 / 7, 4 / 7),
    (prioritized_cm_metric(0.0), CmTransform("add-fn", (5,)), _BASE, (1.0, 7.0, 3.0, 4.0),
     4 / 7, 4 / 7),
    (prioritized_cm_metric(0.0), CmTransform("row-scale", (2, 1)), _BASE, (2.0, 4.0, 3.0, 4.0),
     4 / 7, 4 / 7),
]

# Column scaling changes prioritized H-accuracy: 19/42 before, 9/20 after.
I7_COUNTEREXAMPLE = (prioritized_cm_metric(0.5), CmTransform("column-scale", (2, 1)), _BASE,
                     (2.0, 2.0, 6.0, 4.0), 19 / 42, 9 / 20)


def regular_accuracy_cm_metric() -> CmMetric:
    return CmMetric("accuracy", accuracy_from_confusion)

