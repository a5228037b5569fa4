import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from haccuracy.core import LabelSet
from haccuracy.errors import NotBinary, TauBelowChance
from haccuracy.penalty import risk_values, sigma_risk, sigma_standard, standard_values

BIN = LabelSet(("neg", "pos"))


@pytest.mark.parametrize("scores, tau, expected", [
    ((0.1, 0.9), 0.8, 1.0),
    ((0.4, 0.6), 0.8, (0.6 - 0.5) / (0.8 - 0.5)),
    ((0.6, 0.4), 0.8, 0.0),
    ((0.2, 0.8), 0.8, 1.0),
])
def test_sigma_standard_binary(scores, tau, expected):
    assert sigma_standard(scores, "pos", tau, BIN) == pytest.approx(expected, abs=1e-15)


def test_sigma_standard_chance_tie():
    assert sigma_standard((0.5, 0.5), "neg", 0.5, BIN) == 1.0


def test_sigma_standard_below_chance():
    with pytest.raises(TauBelowChance):
        sigma_standard((0.5, 0.5), "neg", 0.4, BIN)


def test_sigma_standard_multiclass_ramp():
    ls = LabelSet(("a", "b", "c"))
    assert sigma_standard((0.2, 0.3, 0.5), "c", 0.6, ls) == pytest.approx(
        (0.5 - 1 / 3) / (0.6 - 1 / 3))


@pytest.mark.parametrize("scores, true, expected", [
    ((0.25, 0.75), "pos", 1.0),
    ((0.35, 0.65), "neg", 1.0),
    ((0.35, 0.65), "pos", 0.0),
    ((0.3, 0.7), "pos", 1.0),     # >= tau for positives
    ((0.3, 0.7), "neg", 0.0),     # strict > 1 - tau for negatives
])
def test_sigma_risk(scores, true, expected):
    assert sigma_risk(scores, true, 0.7, BIN) == expected


def test_sigma_risk_positive_override():
    # with "neg" as positive, its threshold is >= tau
    assert sigma_risk((0.7, 0.3), "neg", 0.7, BIN, positive_label="neg") == 1.0
    # ... and "pos" becomes the negative class with the strict 1 - tau cut
    assert sigma_risk((0.7, 0.3), "pos", 0.7, BIN, positive_label="neg") == 0.0
    assert sigma_risk((0.3, 0.7), "pos", 0.7, BIN, positive_label="neg") == 1.0


def test_sigma_risk_binary_only():
    with pytest.raises(NotBinary):
        sigma_risk((0.2, 0.3, 0.5), "a", 0.5, LabelSet(("a", "b", "c")))


unit = st.floats(0.0, 1.0)


@st.composite
def simplex(draw, k):
    raw = draw(st.lists(st.floats(0.01, 1.0), min_size=k, max_size=k))
    total = sum(raw)
    return tuple(v / total for v in raw)


@given(st.sampled_from([2, 3, 5]).flatmap(lambda k: st.tuples(st.just(k), simplex(k))),
       st.floats(0.0, 1.0), st.data())
@settings(max_examples=200)
def test_standard_range_and_tau_antitone(case, u, data):
    k, scores = case
    ls = LabelSet(tuple(f"c{i}" for i in range(k)))
    true = data.draw(st.sampled_from(ls.labels))
    t1 = 1 / k + u * (1 - 1 / k)
    t2 = data.draw(st.floats(t1, 1.0))
    v1 = sigma_standard(scores, true, t1, ls)
    v2 = sigma_standard(scores, true, t2, ls)
    assert 0.0 <= v2 <= v1 <= 1.0


@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.floats(0.5, 1.0))
def test_standard_monotone_in_true_score(a, b, tau):
    # binary, raw scores: raise the true-class score with the other fixed
    lo, hi = sorted((a, b))
    other = 0.5
    v_lo = sigma_standard((other, lo), "pos", tau, BIN)
    v_hi = sigma_standard((other, hi), "pos", tau, BIN)
    assert v_lo <= v_hi


@given(st.floats(0.5, 1.0, exclude_min=True))
def test_standard_continuous_at_tau(tau):
    assert sigma_standard((1 - tau, tau), "pos", tau, BIN) == pytest.approx(1.0, abs=1e-12)


@given(st.sampled_from([2, 3, 5]).flatmap(lambda k: st.tuples(st.just(k), simplex(k))),
       st.data())
def test_chance_tau_is_argmax_indicator(case, data):
    k, scores = case
    ls = LabelSet(tuple(f"c{i}" for i in range(k)))
    i = data.draw(st.integers(0, k - 1))
    assert sigma_standard(scores, ls.labels[i], 1 / k, ls) == float(scores[i] >= max(scores))


@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3, 5]), st.floats(0.0, 1.0))
@settings(max_examples=50)
def test_vectorized_matches_scalar(seed, k, u):
    rng = np.random.default_rng(seed)
    scores = rng.dirichlet(np.ones(k), size=20)
    y = rng.integers(0, k, size=20)
    ls = LabelSet(tuple(f"c{i}" for i in range(k)))
    tau = 1 / k + u * (1 - 1 / k)
    vec = standard_values(scores, y, tau)
    assert vec.tolist() == [sigma_standard(s, ls.labels[c], tau, ls) for s, c in zip(scores, y)]
    if k == 2:
        rtau = min(max(u, 1e-3), 1 - 1e-3)
        rv = risk_values(scores, y, rtau)
        assert rv.tolist() == [sigma_risk(s, ls.labels[c], rtau, ls) for s, c in zip(scores, y)]


@given(unit, unit, st.floats(0.01, 0.99))
def test_risk_range(a, b, tau):
    assume(a + b > 0)
    scores = (a / (a + b), b / (a + b))
    assert sigma_risk(scores, "pos", tau, BIN) in (0.0, 1.0)
    assert sigma_risk(scores, "neg", tau, BIN) in (0.0, 1.0)
