"""Accuracy-family metrics and the Net Benefit family.

The central quantity is :func:`h_accuracy`: a priority-weighted average over
classes of complexity-weighted, penalty-discounted per-class hit rates.
Balanced accuracy, confident, prioritized and practical accuracy are all
special parameterizations of it. With the binary risk penalty and priorities
``<tau (1 - pi), (1 - tau) pi> / alpha`` it is an affine function of Net
Benefit, which :func:`net_benefit_via_ha` exploits.

Sums are taken with :func:`math.fsum` in instance order and then class
order, so results do not depend on numpy's reduction strategy.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .core import (
    ComplexityAssignment,
    ConfusionMatrix,
    Dataset,
    PenaltyKind,
    PenaltySpec,
    PriorityVector,
)
from .errors import (
    DataError,
    DegenerateAtOne,
    EmptyClass,
    ParameterError,
    PrevalenceNotHalf,
    TauOutOfRange,
    ZeroComplexityClass,
)
from .penalty import penalty_values


@dataclass(frozen=True)
class HaParams:
    tau: float
    priorities: PriorityVector
    complexity: ComplexityAssignment
    penalty_kind: PenaltyKind = "standard"
    positive_label: str | None = None


@dataclass(frozen=True)
class BinaryRates:
    tpr: float
    fpr: float
    prevalence: float

    def __post_init__(self):
        if not (0.0 <= self.tpr <= 1.0 and 0.0 <= self.fpr <= 1.0):
            raise ValueError(f"rates must lie in [0, 1]: tpr={self.tpr!r}, fpr={self.fpr!r}")
        if not (0.0 < self.prevalence < 1.0):
            raise ValueError(f"prevalence must lie in (0, 1), got {self.prevalence!r}")


def _positive_index(dataset: Dataset, positive_label: str | None) -> int:
    if positive_label is None:
        return 1
    try:
        return dataset.label_set.index(positive_label)
    except KeyError:
        raise ParameterError(f"positive label {positive_label!r} not in label set") from None


def regular_accuracy(dataset: Dataset) -> float:
    hits = int(np.count_nonzero(dataset.predicted == dataset.y))
    return hits / len(dataset)


def per_class_recall(dataset: Dataset) -> np.ndarray:
    dataset.require_all_classes()
    counts = dataset.class_counts()
    hits = np.bincount(dataset.y[dataset.predicted == dataset.y], minlength=dataset.k)
    return hits / counts


def balanced_accuracy(dataset: Dataset) -> float:
    return math.fsum(per_class_recall(dataset).tolist()) / dataset.k


def weighted_class_average(y: np.ndarray, sigma: np.ndarray, weights: np.ndarray,
                           priorities: np.ndarray, labels: Sequence[str]) -> float:
    """``sum_l p(l) * sum_{x in l} d(x) sigma(x) / sum_{x in l} d(x)``."""
    terms = []
    for c, label in enumerate(labels):
        mask = y == c
        dc = weights[mask]
        total = math.fsum(dc.tolist())
        if total <= 0.0:
            raise ZeroComplexityClass(f"complexity weights of class {label!r} sum to zero")
        inner = math.fsum((dc * sigma[mask]).tolist()) / total
        terms.append(priorities[c] * inner)
    return math.fsum(terms)


def h_accuracy(dataset: Dataset, params: HaParams) -> float:
    spec = PenaltySpec(params.penalty_kind, params.tau)
    spec.check(dataset.k)
    dataset.require_all_classes()
    p = params.priorities.as_array(dataset.label_set)
    d = params.complexity.weights_for(dataset)
    sigma = penalty_values(dataset, spec, _positive_index(dataset, params.positive_label))
    return weighted_class_average(dataset.y, sigma, d, p, dataset.label_set.labels)


def confident_accuracy(dataset: Dataset, tau: float) -> float:
    params = HaParams(tau, PriorityVector.uniform(dataset.label_set), ComplexityAssignment.const())
    return h_accuracy(dataset, params)


def prioritized_accuracy(dataset: Dataset, priorities: PriorityVector) -> float:
    params = HaParams(1.0 / dataset.k, priorities, ComplexityAssignment.const())
    return h_accuracy(dataset, params)


def practical_accuracy(dataset: Dataset, complexity: ComplexityAssignment) -> float:
    params = HaParams(1.0 / dataset.k, PriorityVector.uniform(dataset.label_set), complexity)
    return h_accuracy(dataset, params)


def _check_risk_tau(tau: float) -> None:
    if tau == 1.0:
        raise DegenerateAtOne("tau = 1 makes the harm-to-benefit ratio tau/(1 - tau) infinite")
    if not (0.0 < tau < 1.0):
        raise TauOutOfRange(f"threshold must lie in (0, 1), got {tau!r}")


def net_benefit(rates: BinaryRates, tau: float) -> float:
    _check_risk_tau(tau)
    pi = rates.prevalence
    return rates.tpr * pi - (1.0 - pi) * (tau / (1.0 - tau)) * rates.fpr


def standardized_net_benefit(rates: BinaryRates, tau: float) -> float:
    """Net Benefit divided by prevalence (relative utility)."""
    return net_benefit(rates, tau) / rates.prevalence


def youden_index(rates: BinaryRates) -> float:
    return rates.tpr - rates.fpr


def prevalence(dataset: Dataset, positive_label: str | None = None) -> float:
    dataset.require_binary()
    pos = _positive_index(dataset, positive_label)
    return int(np.count_nonzero(dataset.y == pos)) / len(dataset)


def risk_rates(dataset: Dataset, tau: float, positive_label: str | None = None,
               prevalence_override: float | None = None) -> BinaryRates:
    """Rates induced by thresholding at risk level ``tau``.

    A positive counts as detected when its positive score is at least
    ``tau``; a negative is a false positive when its negative score is at
    most ``1 - tau`` (the complement of being correctly rejected).
    """
    dataset.require_binary()
    dataset.require_all_classes()
    pos = _positive_index(dataset, positive_label)
    neg = 1 - pos
    scores, y = dataset.scores, dataset.y
    pos_rows, neg_rows = y == pos, y == neg
    tp = int(np.count_nonzero(scores[pos_rows, pos] >= tau))
    fp = int(np.count_nonzero(scores[neg_rows, neg] <= 1.0 - tau))
    n_pos, n_neg = int(pos_rows.sum()), int(neg_rows.sum())
    pi = n_pos / len(dataset) if prevalence_override is None else prevalence_override
    return BinaryRates(tp / n_pos, fp / n_neg, pi)


def risk_priorities(tau: float, prevalence: float, label_set, positive_label: str | None = None
                    ) -> tuple[PriorityVector, float]:
    """Priorities ``<tau (1 - pi), (1 - tau) pi> / alpha`` and ``alpha``."""
    labels = label_set.labels
    pos = 1 if positive_label is None else label_set.index(positive_label)
    neg_weight = tau * (1.0 - prevalence)
    pos_weight = (1.0 - tau) * prevalence
    alpha = neg_weight + pos_weight
    weights = {labels[1 - pos]: neg_weight / alpha, labels[pos]: pos_weight / alpha}
    return PriorityVector(weights), alpha


def net_benefit_via_ha(dataset: Dataset, tau: float, prevalence_override: float | None = None,
                       positive_label: str | None = None) -> float:
    """Net Benefit recovered from H-accuracy under the risk penalty."""
    dataset.require_binary()
    _check_risk_tau(tau)
    pi = prevalence(dataset, positive_label) if prevalence_override is None else prevalence_override
    if not (0.0 < pi < 1.0):
        raise DataError(f"prevalence must lie in (0, 1), got {pi!r}")
    priorities, alpha = risk_priorities(tau, pi, dataset.label_set, positive_label)
    ha = h_accuracy(dataset, HaParams(tau, priorities, ComplexityAssignment.const(), "risk",
                                      positive_label))
    return alpha / (1.0 - tau) * ha - tau * (1.0 - pi) / (1.0 - tau)


def standardized_nb_via_ha(dataset: Dataset, tau: float, strict: bool = True,
                           tolerance: float = 1e-9, positive_label: str | None = None) -> float:
    """Standardized Net Benefit from H-accuracy with priorities ``<tau, 1 - tau>``.

    The relation only holds at prevalence 1/2; with ``strict`` any other
    empirical prevalence raises :class:`PrevalenceNotHalf`.
    """
    dataset.require_binary()
    _check_risk_tau(tau)
    pi = prevalence(dataset, positive_label)
    if strict and abs(pi - 0.5) > tolerance:
        raise PrevalenceNotHalf(f"empirical prevalence is {pi!r}, not 0.5")
    labels = dataset.label_set.labels
    pos = _positive_index(dataset, positive_label)
    priorities = PriorityVector({labels[1 - pos]: tau, labels[pos]: 1.0 - tau})
    ha = h_accuracy(dataset, HaParams(tau, priorities, ComplexityAssignment.const(), "risk",
                                      positive_label))
    return (ha - tau) / (1.0 - tau)


def roc_points(dataset: Dataset, thresholds: Sequence[float] | None = None,
               positive_label: str | None = None) -> list[tuple[float, float]]:
    """``(fpr, tpr)`` pairs, predicting positive when the positive score is
    at least the threshold. Thresholds are visited in decreasing order, so
    both coordinates are non-decreasing along the list. Without explicit
    thresholds the curve runs through every distinct score, from (0, 0) to
    (1, 1)."""
    dataset.require_binary()
    dataset.require_all_classes()
    pos = _positive_index(dataset, positive_label)
    s = dataset.scores[:, pos]
    is_pos = dataset.y == pos
    n_pos, n_neg = int(is_pos.sum()), int((~is_pos).sum())
    if thresholds is None:
        grid = [math.inf, *sorted(set(s.tolist()), reverse=True)]
    else:
        grid = sorted((float(t) for t in thresholds), reverse=True)
    points = []
    for t in grid:
        predicted = s >= t
        tpr = int(np.count_nonzero(predicted & is_pos)) / n_pos
        fpr = int(np.count_nonzero(predicted & ~is_pos)) / n_neg
        points.append((fpr, tpr))
    return points


def auroc(dataset: Dataset, positive_label: str | None = None) -> float:
    pts = roc_points(dataset, positive_label=positive_label)
    area = [(x1 - x0) * (y0 + y1) / 2.0 for (x0, y0), (x1, y1) in zip(pts, pts[1:])]
    return math.fsum(area)


def ha_from_confusion(cm: ConfusionMatrix, priorities: PriorityVector) -> float:
    """Prioritized H-accuracy of a confusion matrix: ``sum_l p(l) * recall(l)``.

    This is H-accuracy at chance-level tau with constant complexity, the only
    setting in which it depends on the confusion matrix alone.
    """
    p = priorities.as_array(cm.label_set)
    rows = cm.counts.sum(axis=1)
    if (rows == 0).any():
        raise EmptyClass("confusion matrix has an empty true-class row")
    recall = np.diag(cm.counts) / rows
    return math.fsum((p * recall).tolist())


def accuracy_from_confusion(cm: ConfusionMatrix) -> float:
    return float(np.trace(cm.counts)) / cm.total
