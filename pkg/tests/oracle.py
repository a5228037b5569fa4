"""Brute-force reference formulas in exact rational arithmetic.

Nothing here imports the engine. Scores are converted to ``Fraction`` from
their decimal string form so every comparison and ratio is exact; the engine
results are then checked against these values.
"""

from fractions import Fraction


def frac(x):
    return x if isinstance(x, Fraction) else Fraction(str(x))


def argmax_first(scores):
    best = 0
    for j, s in enumerate(scores):
        if s > scores[best]:
            best = j
    return best


def penalty(scores, true_idx, tau):
    """Piecewise confidence penalty, evaluated branch by branch."""
    scores = [frac(s) for s in scores]
    tau = frac(tau)
    k = len(scores)
    chance = Fraction(1, k)
    s = scores[true_idx]
    top = max(scores)
    if tau == chance:
        return Fraction(1) if s >= top else Fraction(0)
    if s < top:
        return Fraction(0)
    if s <= tau:
        return (s - chance) / (tau - chance)
    return Fraction(1)


def risk_penalty(scores, true_idx, tau, positive_idx=1):
    scores = [frac(s) for s in scores]
    tau = frac(tau)
    s = scores[true_idx]
    if true_idx == positive_idx:
        return Fraction(1) if s >= tau else Fraction(0)
    return Fraction(1) if s > 1 - tau else Fraction(0)


def h_accuracy(rows, labels, tau, priorities, complexity, kind="standard"):
    """rows: list of (id, true_label, scores). priorities: label -> weight.
    complexity: id -> weight."""
    total = Fraction(0)
    for li, label in enumerate(labels):
        members = [r for r in rows if r[1] == label]
        dsum = sum((frac(complexity[r[0]]) for r in members), Fraction(0))
        inner = Fraction(0)
        for rid, _, scores in members:
            if kind == "standard":
                sig = penalty(scores, li, tau)
            else:
                sig = risk_penalty(scores, li, tau)
            inner += frac(complexity[rid]) / dsum * sig
        total += frac(priorities[label]) * inner
    return total


def regular_accuracy(rows, labels):
    hits = sum(1 for _, y, s in rows if labels[argmax_first([frac(v) for v in s])] == y)
    return Fraction(hits, len(rows))


def balanced_accuracy(rows, labels):
    parts = []
    for label in labels:
        members = [r for r in rows if r[1] == label]
        hits = sum(1 for _, y, s in members if labels[argmax_first([frac(v) for v in s])] == y)
        parts.append(Fraction(hits, len(members)))
    return sum(parts, Fraction(0)) / len(labels)


def risk_rates(rows, labels, tau):
    """TPR and FPR obtained by thresholding the positive score at tau."""
    tau = frac(tau)
    neg, pos = labels
    positives = [r for r in rows if r[1] == pos]
    negatives = [r for r in rows if r[1] == neg]
    tp = sum(1 for _, _, s in positives if frac(s[1]) >= tau)
    fp = sum(1 for _, _, s in negatives if frac(s[0]) <= 1 - tau)
    return Fraction(tp, len(positives)), Fraction(fp, len(negatives))


def net_benefit(tpr, fpr, prevalence, tau):
    tpr, fpr, prevalence, tau = map(frac, (tpr, fpr, prevalence, tau))
    return tpr * prevalence - (1 - prevalence) * tau / (1 - tau) * fpr
