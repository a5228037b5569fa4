"""Penalty functions that discount correct-but-unconfident predictions.

``sigma_standard`` is the symmetric confidence penalty: zero when the true
class is not the top score, a linear ramp from chance level (1/k) up to
``tau``, and one above ``tau``. ``sigma_risk`` is the binary risk-threshold
variant used to connect H-accuracy with Net Benefit: positives count when
their positive score reaches ``tau``, negatives when their negative score
exceeds ``1 - tau``.

Each has a scalar form taking one score vector and a vectorized form taking
a whole score matrix.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from .core import Dataset, LabelSet, PenaltySpec
from .errors import NotBinary, ParameterError, TauBelowChance, TauOutOfRange


def _check_standard_tau(tau: float, k: int) -> None:
    if tau < 1.0 / k:
        raise TauBelowChance(f"tau={tau!r} is below chance level 1/{k}")
    if tau > 1.0:
        raise TauOutOfRange(f"tau={tau!r} exceeds 1")


def _check_risk_tau(tau: float, k: int) -> None:
    if k != 2:
        raise NotBinary(f"risk penalty needs a binary label set, got {k} labels")
    if not (0.0 < tau < 1.0):
        raise TauOutOfRange(f"risk threshold must lie in (0, 1), got {tau!r}")


def sigma_standard(scores: Sequence[float], true_label: str, tau: float,
                   label_set: LabelSet) -> float:
    k = label_set.k
    _check_standard_tau(tau, k)
    s = float(scores[label_set.index(true_label)])
    top = max(float(v) for v in scores)
    chance = 1.0 / k
    if tau == chance:
        return 1.0 if s >= top else 0.0
    if s < top:
        return 0.0
    if s <= tau:
        # s can sit below chance only for unnormalized (raw) scores
        return max(0.0, (s - chance) / (tau - chance))
    return 1.0


def sigma_risk(scores: Sequence[float], true_label: str, tau: float, label_set: LabelSet,
               positive_label: str | None = None) -> float:
    _check_risk_tau(tau, label_set.k)
    positive = label_set.labels[1] if positive_label is None else positive_label
    if positive not in label_set:
        raise ParameterError(f"positive label {positive!r} not in {label_set.labels}")
    s = float(scores[label_set.index(true_label)])
    if true_label == positive:
        return 1.0 if s >= tau else 0.0
    return 1.0 if s > 1.0 - tau else 0.0


def standard_values(scores: np.ndarray, y: np.ndarray, tau: float) -> np.ndarray:
    """Vectorized ``sigma_standard`` for every row of ``scores``."""
    n, k = scores.shape
    _check_standard_tau(tau, k)
    s = scores[np.arange(n), y]
    top = scores.max(axis=1)
    chance = 1.0 / k
    if tau == chance:
        return (s >= top).astype(float)
    ramp = np.maximum(0.0, (s - chance) / (tau - chance))
    out = np.where(s > tau, 1.0, ramp)
    return np.where(s < top, 0.0, out)


def risk_values(scores: np.ndarray, y: np.ndarray, tau: float, positive: int = 1) -> np.ndarray:
    """Vectorized ``sigma_risk``; ``positive`` is the positive column index."""
    n, k = scores.shape
    _check_risk_tau(tau, k)
    s = scores[np.arange(n), y]
    is_pos = y == positive
    return np.where(is_pos, s >= tau, s > 1.0 - tau).astype(float)


def penalty_values(dataset: Dataset, spec: PenaltySpec, positive: int = 1) -> np.ndarray:
    if spec.kind == "standard":
        return standard_values(dataset.scores, dataset.y, spec.tau)
    if spec.kind == "risk":
        return risk_values(dataset.scores, dataset.y, spec.tau, positive)
    raise ParameterError(f"unknown penalty kind {spec.kind!r}")
