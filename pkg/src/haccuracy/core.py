"""Domain types: label sets, datasets of scored instances, metric parameters
and confusion matrices.

Every type here is immutable. A :class:`Dataset` keeps its instances in the
order they were given; numpy views of the scores and true-label indices are
built lazily and cached.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Literal

import numpy as np

from .errors import (
    EmptyClass,
    InvalidComplexity,
    InvalidPriorities,
    MissingComplexity,
    NotBinary,
    ParameterError,
    TauBelowChance,
    TauOutOfRange,
    ValidationError,
    Violation,
)

NormalizationMode = Literal["soft", "raw"]
PenaltyKind = Literal["standard", "risk"]

SUM_TOLERANCE = 1e-9


@dataclass(frozen=True)
class LabelSet:
    """Ordered class identifiers. The order fixes score-column order and
    breaks argmax ties (earlier label wins)."""

    labels: tuple[str, ...]

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        if len(labels) < 2:
            raise ValueError("a label set needs at least two labels")
        if any(not isinstance(l, str) or not l for l in labels):
            raise ValueError("labels must be non-empty strings")
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate labels in {labels!r}")

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __contains__(self, label) -> bool:
        return label in self.labels

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown label {label!r}") from None

    @property
    def k(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class Instance:
    id: str
    true_label: str
    scores: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "scores", tuple(float(s) for s in self.scores))


@dataclass(frozen=True)
class Dataset:
    label_set: LabelSet
    instances: tuple[Instance, ...]

    def __post_init__(self):
        object.__setattr__(self, "instances", tuple(self.instances))

    @classmethod
    def from_arrays(
        cls,
        labels: Sequence[str],
        true_labels: Sequence[str] | np.ndarray,
        scores: np.ndarray | Sequence[Sequence[float]],
        ids: Sequence[str] | None = None,
    ) -> Dataset:
        """Build a dataset from parallel arrays. ``true_labels`` may hold
        label strings or integer indices into ``labels``."""
        label_set = labels if isinstance(labels, LabelSet) else LabelSet(tuple(labels))
        scores = np.asarray(scores, dtype=float)
        if ids is None:
            ids = [f"x{i + 1}" for i in range(len(scores))]
        instances = []
        for rid, y, row in zip(ids, true_labels, scores):
            if not isinstance(y, str):
                y = label_set.labels[int(y)]
            instances.append(Instance(str(rid), y, tuple(row.tolist())))
        return cls(label_set, tuple(instances))

    def __len__(self) -> int:
        return len(self.instances)

    @property
    def k(self) -> int:
        return self.label_set.k

    @cached_property
    def ids(self) -> tuple[str, ...]:
        return tuple(x.id for x in self.instances)

    @cached_property
    def scores(self) -> np.ndarray:
        arr = np.array([x.scores for x in self.instances], dtype=float).reshape(len(self), self.k)
        arr.flags.writeable = False
        return arr

    @cached_property
    def y(self) -> np.ndarray:
        arr = np.array([self.label_set.index(x.true_label) for x in self.instances], dtype=np.intp)
        arr.flags.writeable = False
        return arr

    @cached_property
    def predicted(self) -> np.ndarray:
        """Argmax label index per instance, first maximal column on ties."""
        arr = np.argmax(self.scores, axis=1)
        arr.flags.writeable = False
        return arr

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.y, minlength=self.k)

    def require_all_classes(self) -> None:
        counts = self.class_counts()
        empty = [self.label_set.labels[i] for i in np.flatnonzero(counts == 0)]
        if empty:
            raise EmptyClass(f"no instances with true label {', '.join(map(repr, empty))}")

    def require_binary(self) -> None:
        if self.k != 2:
            raise NotBinary(f"binary label set required, got {self.k} labels")


def validate_dataset(dataset: Dataset, mode: NormalizationMode = "soft") -> Dataset:
    """Check every dataset and score invariant; return the dataset unchanged
    or raise :class:`ValidationError` listing all violations found."""
    if mode not in ("soft", "raw"):
        raise ParameterError(f"unknown normalization mode {mode!r}")
    violations: list[Violation] = []
    if len(dataset.instances) == 0:
        violations.append(Violation("EmptyDataset", "dataset has no instances"))
    seen: dict[str, int] = {}
    k = dataset.label_set.k
    for row, inst in enumerate(dataset.instances, start=1):
        if not inst.id:
            violations.append(Violation("EmptyId", "instance id is empty", row))
        elif inst.id in seen:
            violations.append(
                Violation("DuplicateId", f"id {inst.id!r} already used at row {seen[inst.id]}", row)
            )
        else:
            seen[inst.id] = row
        if inst.true_label not in dataset.label_set:
            violations.append(Violation("UnknownLabel", f"true label {inst.true_label!r}", row))
        if len(inst.scores) != k:
            violations.append(
                Violation("ScoreArity", f"expected {k} scores, got {len(inst.scores)}", row)
            )
            continue
        bad = [s for s in inst.scores if not (0.0 <= s <= 1.0)]
        if bad:
            violations.append(Violation("ScoreOutOfRange", f"scores outside [0, 1]: {bad}", row))
        elif mode == "soft":
            total = math.fsum(inst.scores)
            if abs(total - 1.0) > SUM_TOLERANCE:
                violations.append(
                    Violation("ScoresNotNormalized", f"scores sum to {total!r}, not 1", row)
                )
    if violations:
        raise ValidationError(violations)
    return dataset


def argmax_label(scores: Sequence[float], label_set: LabelSet) -> str:
    """Label with the highest score; ties go to the earliest label."""
    best = 0
    for j in range(1, len(scores)):
        if scores[j] > scores[best]:
            best = j
    return label_set.labels[best]


@dataclass(frozen=True)
class PriorityVector:
    """Per-class importance weights, summing to one."""

    weights: Mapping[str, float]

    def __post_init__(self):
        weights = {str(k): float(v) for k, v in dict(self.weights).items()}
        bad = {k: v for k, v in weights.items() if not (0.0 <= v <= 1.0)}
        if bad:
            raise InvalidPriorities(f"priorities outside [0, 1]: {bad}")
        total = math.fsum(weights.values())
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise InvalidPriorities(f"priorities sum to {total!r}, not 1")
        object.__setattr__(self, "weights", MappingProxyType(weights))

    @classmethod
    def uniform(cls, label_set: LabelSet) -> PriorityVector:
        return cls({l: 1.0 / label_set.k for l in label_set})

    @classmethod
    def binary(cls, positive: float, label_set: LabelSet) -> PriorityVector:
        """``<1 - positive, positive>`` over a binary label set."""
        if label_set.k != 2:
            raise NotBinary("binary priorities need a two-label set")
        neg, pos = label_set.labels
        return cls({neg: 1.0 - positive, pos: positive})

    def __getitem__(self, label: str) -> float:
        return self.weights[label]

    def as_array(self, label_set: LabelSet) -> np.ndarray:
        if set(self.weights) != set(label_set.labels):
            raise InvalidPriorities(
                f"priorities cover {sorted(self.weights)}, labels are {list(label_set.labels)}"
            )
        return np.array([self.weights[l] for l in label_set], dtype=float)

    def __eq__(self, other):
        if not isinstance(other, PriorityVector):
            return NotImplemented
        return dict(self.weights) == dict(other.weights)

    def __hash__(self):
        return hash(tuple(sorted(self.weights.items())))


@dataclass(frozen=True)
class ComplexityAssignment:
    """Per-instance difficulty weights.

    Either an explicit ``values`` map (instance id to a weight in [0, 1]) or,
    when ``values`` is None, the same ``constant`` (> 0) for every instance.
    """

    values: Mapping[str, float] | None = None
    constant: float | None = None

    def __post_init__(self):
        if (self.values is None) == (self.constant is None):
            raise InvalidComplexity("give exactly one of values or constant")
        if self.values is not None:
            values = {str(k): float(v) for k, v in dict(self.values).items()}
            bad = {k: v for k, v in values.items() if not (0.0 <= v <= 1.0)}
            if bad:
                raise InvalidComplexity(f"complexity values outside [0, 1]: {bad}")
            object.__setattr__(self, "values", MappingProxyType(values))
        else:
            c = float(self.constant)
            if not (c > 0 and math.isfinite(c)):
                raise InvalidComplexity(f"constant complexity must be > 0, got {c!r}")
            object.__setattr__(self, "constant", c)

    @classmethod
    def const(cls, value: float = 1.0) -> ComplexityAssignment:
        return cls(constant=value)

    @property
    def is_constant(self) -> bool:
        return self.values is None

    def weights_for(self, dataset: Dataset) -> np.ndarray:
        if self.values is None:
            return np.full(len(dataset), self.constant)
        missing = [i for i in dataset.ids if i not in self.values]
        if missing:
            shown = ", ".join(missing[:5]) + (" ..." if len(missing) > 5 else "")
            raise MissingComplexity(f"no complexity for {len(missing)} instance(s): {shown}")
        return np.array([self.values[i] for i in dataset.ids], dtype=float)

    def __eq__(self, other):
        if not isinstance(other, ComplexityAssignment):
            return NotImplemented
        a = None if self.values is None else dict(self.values)
        b = None if other.values is None else dict(other.values)
        return a == b and self.constant == other.constant

    def __hash__(self):
        vals = None if self.values is None else tuple(sorted(self.values.items()))
        return hash((vals, self.constant))


@dataclass(frozen=True)
class PenaltySpec:
    kind: PenaltyKind = "standard"
    tau: float = 0.5

    def check(self, k: int) -> None:
        if self.kind == "standard":
            if self.tau < 1.0 / k:
                raise TauBelowChance(f"tau={self.tau!r} is below chance level 1/{k}")
            if self.tau > 1.0:
                raise TauOutOfRange(f"tau={self.tau!r} exceeds 1")
        elif self.kind == "risk":
            if k != 2:
                raise NotBinary("the risk penalty is defined for binary tasks only")
            if not (0.0 < self.tau < 1.0):
                raise TauOutOfRange(f"risk threshold must lie in (0, 1), got {self.tau!r}")
        else:
            raise ParameterError(f"unknown penalty kind {self.kind!r}")


@dataclass(frozen=True)
class ConfusionMatrix:
    """Square matrix of (possibly fractional) counts.

    Rows are true classes and columns predicted classes, both in label-set
    order. For binary sets the second label is the positive class, so the
    named cells are ``tn = counts[0, 0]``, ``fp = counts[0, 1]``,
    ``fn = counts[1, 0]`` and ``tp = counts[1, 1]``.
    """

    counts: np.ndarray
    label_set: LabelSet = field(default_factory=lambda: LabelSet(("neg", "pos")))

    def __post_init__(self):
        counts = np.array(self.counts, dtype=float)
        k = self.label_set.k
        if counts.shape != (k, k):
            raise ValueError(f"expected a {k}x{k} matrix, got shape {counts.shape}")
        if (counts < 0).any() or not np.isfinite(counts).all():
            raise ValueError("confusion matrix entries must be finite and >= 0")
        if counts.sum() <= 0:
            raise ValueError("confusion matrix total must be > 0")
        counts.flags.writeable = False
        object.__setattr__(self, "counts", counts)

    @classmethod
    def binary(cls, tp: float, fn: float, fp: float, tn: float,
               label_set: LabelSet | None = None) -> ConfusionMatrix:
        label_set = label_set or LabelSet(("neg", "pos"))
        return cls(np.array([[tn, fp], [fn, tp]], dtype=float), label_set)

    def _binary_cell(self, i: int, j: int) -> float:
        if self.label_set.k != 2:
            raise NotBinary("named cells exist only for binary matrices")
        return float(self.counts[i, j])

    @property
    def tp(self) -> float:
        return self._binary_cell(1, 1)

    @property
    def fn(self) -> float:
        return self._binary_cell(1, 0)

    @property
    def fp(self) -> float:
        return self._binary_cell(0, 1)

    @property
    def tn(self) -> float:
        return self._binary_cell(0, 0)

    @property
    def total(self) -> float:
        return float(self.counts.sum())

    def cells(self) -> tuple[float, float, float, float]:
        """``(tp, fn, fp, tn)``."""
        return self.tp, self.fn, self.fp, self.tn

    def __eq__(self, other):
        if not isinstance(other, ConfusionMatrix):
            return NotImplemented
        return self.label_set == other.label_set and np.array_equal(self.counts, other.counts)

    def __hash__(self):
        return hash((self.label_set, self.counts.tobytes()))


def confusion_matrix(dataset: Dataset) -> ConfusionMatrix:
    k = dataset.k
    counts = np.zeros((k, k))
    np.add.at(counts, (dataset.y, dataset.predicted), 1.0)
    return ConfusionMatrix(counts, dataset.label_set)


@dataclass(frozen=True)
class RaterAnnotation:
    """One rater's reading of one case: a label per decision plus ordinal
    confidence and complexity ratings."""

    rater_id: str
    instance_id: str
    assigned_labels: Mapping[str, str]
    confidence: int
    complexity: int

    def __post_init__(self):
        object.__setattr__(self, "assigned_labels", MappingProxyType(dict(self.assigned_labels)))
        if self.confidence < 1 or self.complexity < 1:
            raise ValueError("ordinal ratings start at 1")


@dataclass(frozen=True)
class RaterPerformance:
    rater_id: str
    tpr: float
    tnr: float

    def __post_init__(self):
        for name in ("tpr", "tnr"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {v!r}")

