"""Deriving H-accuracy parameters from rater annotations.

Raters label each case (possibly several yes/no decisions per case) and rate
their confidence and the case complexity on ordinal scales. From that data:

* priorities come from the raters' mean true-positive and true-negative
  rates, from a stated preference, or from a risk threshold and prevalence;
* tau is the highest normalized confidence level whose right tail still
  holds a fraction ``r`` of the correct answers;
* complexity weights come from per-case mean complexity, mapped to a
  two-level (1/2, 1) or binary (0, 1) scale around a threshold.
"""

from __future__ import annotations

import bisect
import math
import warnings
from collections import defaultdict
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from types import MappingProxyType
from typing import Literal

from .core import (
    ComplexityAssignment,
    Dataset,
    LabelSet,
    PriorityVector,
    RaterAnnotation,
    RaterPerformance,
)
from .errors import (
    DataError,
    DegenerateRaters,
    MissingComplexity,
    NoCorrectAnnotations,
    OutOfScaleOrdinal,
    ParameterError,
    UnknownInstance,
)
from .metrics import risk_priorities

ANY_DECISION = "*"
DEFAULT_LABELS = LabelSet(("neg", "pos"))
DEFAULT_FRACTIONS = (0.5, 0.33, 0.2)

Preference = Literal["favor-specificity", "favor-sensitivity", "balanced"]


@dataclass(frozen=True)
class AnnotationSet:
    """Annotations plus the ordinal scale bounds and the gold standard.

    ``gold`` maps an instance id to ``{decision: label}``. The decision key
    ``"*"`` applies to every decision of that instance, which is how a plain
    ``instance -> label`` gold standard is stored.
    """

    annotations: tuple[RaterAnnotation, ...]
    confidence_scale_max: int
    complexity_scale_max: int
    gold: Mapping[str, Mapping[str, str]]

    def __post_init__(self):
        object.__setattr__(self, "annotations", tuple(self.annotations))
        gold = {}
        for iid, value in dict(self.gold).items():
            entry = {ANY_DECISION: value} if isinstance(value, str) else dict(value)
            gold[str(iid)] = MappingProxyType(entry)
        object.__setattr__(self, "gold", MappingProxyType(gold))
        for a in self.annotations:
            if a.instance_id not in gold:
                raise UnknownInstance(f"instance {a.instance_id!r} has no gold label")
            if not 1 <= a.confidence <= self.confidence_scale_max:
                raise OutOfScaleOrdinal(
                    f"confidence {a.confidence} outside 1..{self.confidence_scale_max}")
            if not 1 <= a.complexity <= self.complexity_scale_max:
                raise OutOfScaleOrdinal(
                    f"complexity {a.complexity} outside 1..{self.complexity_scale_max}")

    @property
    def decisions(self) -> tuple[str, ...]:
        return tuple(sorted({d for a in self.annotations for d in a.assigned_labels}))

    def resolve_decision(self, decision: str | None) -> str:
        known = self.decisions
        if decision is None:
            if len(known) != 1:
                raise ParameterError(f"several decisions present {known}; pick one explicitly")
            return known[0]
        if decision not in known:
            raise ParameterError(f"unknown decision {decision!r}; known: {known}")
        return decision

    def gold_label(self, instance_id: str, decision: str) -> str | None:
        entry = self.gold[instance_id]
        return entry.get(decision, entry.get(ANY_DECISION))

    def is_correct(self, annotation: RaterAnnotation, decision: str) -> bool | None:
        """None when the rater did not answer this decision or it has no gold."""
        assigned = annotation.assigned_labels.get(decision)
        truth = self.gold_label(annotation.instance_id, decision)
        if assigned is None or truth is None:
            return None
        return assigned == truth


@dataclass(frozen=True)
class ComplexityProfile:
    per_case_mean: Mapping[str, float]
    scale_max: int

    def __post_init__(self):
        object.__setattr__(self, "per_case_mean", MappingProxyType(dict(self.per_case_mean)))


def _mean(values: Sequence[float]) -> float:
    return math.fsum(values) / len(values)


def rater_performances(annotations: AnnotationSet, positive_label: str,
                       decision: str | None = None) -> list[RaterPerformance]:
    """Per-rater TPR and TNR against the gold standard for one decision."""
    decision = annotations.resolve_decision(decision)
    tallies: dict[str, list[int]] = defaultdict(lambda: [0, 0, 0, 0])  # tp, p, tn, n
    for a in annotations.annotations:
        assigned = a.assigned_labels.get(decision)
        truth = annotations.gold_label(a.instance_id, decision)
        if assigned is None or truth is None:
            continue
        t = tallies[a.rater_id]
        if truth == positive_label:
            t[1] += 1
            t[0] += assigned == positive_label
        else:
            t[3] += 1
            t[2] += assigned != positive_label
    out = []
    for rater in sorted(tallies):
        tp, p, tn, n = tallies[rater]
        if p == 0 or n == 0:
            raise DataError(f"rater {rater!r} saw no {'positive' if p == 0 else 'negative'} cases")
        out.append(RaterPerformance(rater, tp / p, tn / n))
    return out


def derive_priorities_from_raters(performances: Iterable[RaterPerformance],
                                  label_set: LabelSet = DEFAULT_LABELS) -> PriorityVector:
    """Normalize mean TNR and mean TPR into ``<p(neg), p(pos)>``."""
    performances = list(performances)
    if not performances:
        raise DataError("no rater performances given")
    mean_tpr = _mean([r.tpr for r in performances])
    mean_tnr = _mean([r.tnr for r in performances])
    total = mean_tpr + mean_tnr
    if total == 0:
        raise DegenerateRaters("mean TPR and mean TNR are both zero")
    neg, pos = label_set.labels
    return PriorityVector({neg: mean_tnr / total, pos: mean_tpr / total})


_PRESETS = {
    "favor-specificity": (0.75, 0.25),
    "favor-sensitivity": (0.25, 0.75),
    "balanced": (0.5, 0.5),
}


def priorities_from_preset(preference: Preference,
                           label_set: LabelSet = DEFAULT_LABELS) -> PriorityVector:
    try:
        p_neg, p_pos = _PRESETS[preference]
    except KeyError:
        raise ParameterError(
            f"unknown preference {preference!r}; choose from {sorted(_PRESETS)}") from None
    neg, pos = label_set.labels
    return PriorityVector({neg: p_neg, pos: p_pos})


def priorities_from_risk(tau: float, prevalence: float,
                         label_set: LabelSet = DEFAULT_LABELS) -> PriorityVector:
    if not (0.0 < tau < 1.0):
        raise ParameterError(f"tau must lie in (0, 1), got {tau!r}")
    if not (0.0 < prevalence < 1.0):
        raise ParameterError(f"prevalence must lie in (0, 1), got {prevalence!r}")
    return risk_priorities(tau, prevalence, label_set)[0]


def tau_from_confidence_levels(levels: Iterable[float], r: float) -> float:
    """Largest level ``c`` with at least ``r`` of the values at or above it.

    ``levels`` are the normalized confidences of correctly answered cases.
    """
    if not (0.0 < r <= 1.0):
        raise ParameterError(f"r must lie in (0, 1], got {r!r}")
    levels = list(levels)
    if not levels:
        raise NoCorrectAnnotations("no correctly classified annotations")
    counts: dict[float, int] = defaultdict(int)
    for c in levels:
        counts[c] += 1
    need = r * len(levels)
    tail = 0
    for c in sorted(counts, reverse=True):
        tail += counts[c]
        if tail + 1e-9 >= need:
            return c
    raise AssertionError("unreachable: the full tail always suffices")


def derive_tau_from_confidence(annotations: AnnotationSet, r: float,
                               decision: str | None = None) -> float:
    decision = annotations.resolve_decision(decision)
    scale = annotations.confidence_scale_max
    levels = [a.confidence / scale for a in annotations.annotations
              if annotations.is_correct(a, decision)]
    return tau_from_confidence_levels(levels, r)


def aggregate_complexity(annotations: AnnotationSet,
                         instance_ids: Iterable[str] | None = None) -> ComplexityProfile:
    """Per-case mean of the ordinal complexity ratings.

    Every instance in ``instance_ids`` (default: every gold instance) must
    have at least one rating.
    """
    ratings: dict[str, list[float]] = defaultdict(list)
    for a in annotations.annotations:
        ratings[a.instance_id].append(float(a.complexity))
    wanted = list(annotations.gold) if instance_ids is None else list(instance_ids)
    missing = [i for i in wanted if i not in ratings]
    if missing:
        raise MissingComplexity(f"no complexity rating for: {', '.join(missing[:5])}")
    means = {i: _mean(sorted(ratings[i])) for i in wanted}
    return ComplexityProfile(means, annotations.complexity_scale_max)


def two_level_complexity(profile: ComplexityProfile, high_threshold: float) -> ComplexityAssignment:
    """1 for cases rated above the threshold, 1/2 for the rest."""
    if not (1.0 <= high_threshold <= profile.scale_max):
        raise ParameterError(
            f"threshold {high_threshold!r} outside the 1..{profile.scale_max} scale")
    return ComplexityAssignment(
        {i: 1.0 if m > high_threshold else 0.5 for i, m in profile.per_case_mean.items()})


def binarize_complexity(profile: ComplexityProfile, d_t: float,
                        dataset: Dataset | None = None) -> ComplexityAssignment:
    """1 for cases rated above ``d_t``, 0 otherwise.

    With a ``dataset`` at hand, warns when some class ends up with no
    complex case at all (H-accuracy is then undefined for that class).
    """
    assignment = ComplexityAssignment(
        {i: 1.0 if m > d_t else 0.0 for i, m in profile.per_case_mean.items()})
    if dataset is not None:
        for label in dataset.label_set:
            members = [x.id for x in dataset.instances if x.true_label == label]
            if members and all(assignment.values.get(i, 0.0) == 0.0 for i in members):
                warnings.warn(f"class {label!r} has no case above complexity {d_t}",
                              RuntimeWarning, stacklevel=2)
    return assignment


def quantile_thresholds(profile: ComplexityProfile,
                        fractions: Sequence[float] = DEFAULT_FRACTIONS) -> list[float]:
    """For each fraction q, the smallest observed mean complexity ``t`` with
    at most ``q`` of the cases strictly above it."""
    means = sorted(profile.per_case_mean.values())
    n = len(means)
    if n == 0:
        raise DataError("empty complexity profile")
    out = []
    for q in fractions:
        if not (0.0 < q < 1.0):
            raise ParameterError(f"fraction must lie in (0, 1), got {q!r}")
        allowed = q * n + 1e-9
        for t in means:
            above = n - bisect.bisect_right(means, t)
            if above <= allowed:
                out.append(t)
                break
    return out
