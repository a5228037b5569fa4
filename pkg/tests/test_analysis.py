import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from haccuracy.analysis import (
    I7_COUNTEREXAMPLE,
    WITNESSES,
    CmTransform,
    apply_cm_transform,
    check_invariance,
    complex_subset_size,
    complexity_surface,
    nb_ha_curves,
    prevalence_weighted_cm_metric,
    prioritized_cm_metric,
    priority_sweep,
    regular_accuracy_cm_metric,
    run_invariance_suite,
    tau_sweep,
)
from haccuracy.core import ComplexityAssignment, ConfusionMatrix, PriorityVector
from haccuracy.errors import NegativeCell, NotBinary, ParameterError
from haccuracy.metrics import (
    balanced_accuracy,
    confident_accuracy,
    practical_accuracy,
    prioritized_accuracy,
)

from conftest import datasets, make_dataset, random_dataset

BASE = ConfusionMatrix.binary(1, 2, 3, 4)


class TestTauSweep:
    def test_chance_only(self, e1):
        table = tau_sweep(e1, [0.5])
        assert table.rows == (((0.5,), (balanced_accuracy(e1),)),)

    def test_e1(self, e1):
        table = tau_sweep(e1, [0.8, 0.5])
        assert table.column("tau") == [0.5, 0.8]
        assert table.column("confident_accuracy") == pytest.approx([0.5, 0.375], abs=1e-15)

    def test_perfect(self):
        ds = make_dataset(("neg", "pos"), [("a", "neg", (1.0, 0.0)), ("b", "pos", (0.0, 1.0))])
        assert tau_sweep(ds, [0.5, 0.7, 1.0]).column("confident_accuracy") == [1.0] * 3

    @given(datasets(), st.lists(st.floats(0, 1), min_size=1, max_size=10))
    @settings(max_examples=40, deadline=None)
    def test_non_increasing(self, ds, us):
        taus = [1 / ds.k + u * (1 - 1 / ds.k) for u in us]
        values = tau_sweep(ds, taus).column("confident_accuracy")
        assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))


class TestPrioritySweep:
    def test_recalls(self):
        # recall(neg) = 0.6, recall(pos) = 0.9
        rows = ([("neg", (0.9, 0.1))] * 6 + [("neg", (0.1, 0.9))] * 4
                + [("pos", (0.1, 0.9))] * 9 + [("pos", (0.9, 0.1))])
        ds = make_dataset(("neg", "pos"), [(f"i{j}", y, s) for j, (y, s) in enumerate(rows)])
        values = priority_sweep(ds, [0.25, 0.5, 0.75]).column("prioritized_accuracy")
        assert values == pytest.approx([0.675, 0.75, 0.825], abs=1e-12)
        assert priority_sweep(ds, [0.0]).column("prioritized_accuracy") == pytest.approx([0.6])

    def test_binary_only(self):
        with pytest.raises(NotBinary):
            priority_sweep(random_dataset(np.random.default_rng(0), 9, 3), [0.5])

    @given(datasets(k=2), st.lists(st.floats(0, 1), min_size=3, max_size=8, unique=True))
    @settings(max_examples=40, deadline=None)
    def test_affine(self, ds, ps):
        table = priority_sweep(ds, ps)
        xs, ys = table.column("p_positive"), table.column("prioritized_accuracy")
        slope = ys[-1] - ys[0]
        span = xs[-1] - xs[0]
        for x, y in zip(xs, ys):
            line = ys[0] + (x - xs[0]) / span * slope if span else ys[0]
            assert abs(y - line) <= 1e-12


class TestSurface:
    def test_subset_size(self):
        assert complex_subset_size(0.29, 100) == 29
        assert complex_subset_size(0.5, 5) == 2
        assert complex_subset_size(1.0, 7) == 7

    @given(datasets(k=2), st.sampled_from([0.0, 1.0]), st.floats(0, 1))
    @settings(max_examples=30, deadline=None)
    def test_extremes_collapse(self, ds, q, p1):
        table = complexity_surface(ds, [q], [p1], samples_per_point=5, seed=1)
        ((_, (mean, std)),) = table.rows
        expected = prioritized_accuracy(ds, PriorityVector.binary(p1, ds.label_set))
        assert abs(mean - expected) <= 1e-12
        assert std == 0.0

    def test_e1_half_against_enumeration(self, e1):
        subsets = itertools.combinations(e1.ids, 2)
        exhaustive = [practical_accuracy(e1, ComplexityAssignment(
            {i: 1.0 if i in s else 0.5 for i in e1.ids})) for s in subsets]
        target = math.fsum(exhaustive) / len(exhaustive)
        table = complexity_surface(e1, [0.5], [0.5], samples_per_point=1000, seed=7)
        ((_, (mean, std)),) = table.rows
        assert abs(mean - target) <= 3 * std / math.sqrt(1000)

    def test_parallel_equals_serial(self):
        ds = random_dataset(np.random.default_rng(3), 40, 2)
        args = (ds, [0.0, 0.25, 0.5, 1.0], [0.25, 0.5, 0.75], 30, 99)
        assert complexity_surface(*args, workers=1) == complexity_surface(*args, workers=4)

    def test_seed_changes_draws(self):
        ds = random_dataset(np.random.default_rng(3), 40, 2)
        a = complexity_surface(ds, [0.5], [0.5], 30, seed=1)
        b = complexity_surface(ds, [0.5], [0.5], 30, seed=2)
        assert a != b

    @pytest.mark.parametrize("kwargs", [
        {"proportions": [1.5]}, {"priorities": [-0.1]}, {"samples_per_point": 0},
    ])
    def test_parameter_checks(self, e1, kwargs):
        base = {"proportions": [0.5], "priorities": [0.5], "samples_per_point": 3}
        with pytest.raises(ParameterError):
            complexity_surface(e1, **{**base, **kwargs})


class TestNbHaCurves:
    def test_columns(self):
        ds = random_dataset(np.random.default_rng(5), 60, 2, balanced=True)
        taus = [round(0.05 * i, 2) for i in range(1, 20)]
        table = nb_ha_curves(ds, taus)
        conf = table.column("confident_accuracy")
        assert all(b <= a + 1e-12 for a, b in zip(conf, conf[1:]))
        nb_half = table.column("net_benefit")[taus.index(0.5)]
        assert abs(nb_half - (balanced_accuracy(ds) - 0.5)) <= 1e-12
        assert conf[0] == confident_accuracy(ds, 0.5)

    def test_risk_column_near_one_at_small_tau(self):
        rows = [(f"n{i}", "neg", (0.6 + 0.01 * i, 0.4 - 0.01 * i)) for i in range(5)]
        rows += [(f"p{i}", "pos", (0.7, 0.3)) for i in range(5)]
        table = nb_ha_curves(make_dataset(("neg", "pos"), rows), [0.01])
        assert abs(table.column("ha_risk")[0] - 1.0) <= 0.05


class TestTransforms:
    @pytest.mark.parametrize("t, expected", [
        (CmTransform("uniform-scale", (3,)), (3, 6, 9, 12)),
        (CmTransform("class-swap"), (4, 3, 2, 1)),
        (CmTransform("row-scale", (2, 1)), (2, 4, 3, 4)),
        (CmTransform("column-scale", (2, 1)), (2, 2, 6, 4)),
        (CmTransform("add-tn", (5,)), (1, 2, 3, 9)),
        (CmTransform("add-tp", (5,)), (6, 2, 3, 4)),
        (CmTransform("add-fn", (5,)), (1, 7, 3, 4)),
        (CmTransform("add-fp", (5,)), (1, 2, 8, 4)),
    ])
    def test_apply(self, t, expected):
        assert apply_cm_transform(BASE, t).cells() == expected

    def test_negative_cell(self):
        with pytest.raises(NegativeCell):
            apply_cm_transform(BASE, CmTransform("add-tp", (-2,)))

    @pytest.mark.parametrize("kind, params", [
        ("uniform-scale", (0,)), ("row-scale", (2, 2)), ("column-scale", (1,)),
        ("class-swap", (1,)), ("rotate", ()),
    ])
    def test_invalid(self, kind, params):
        with pytest.raises(ParameterError):
            CmTransform(kind, params)

    @given(st.integers(1, 1000), st.integers(1, 1000), st.integers(1, 1000),
           st.integers(1, 1000), st.floats(0.0, 1.0))
    def test_uniform_scale_invariance(self, tp, fn, fp, tn, p1):
        cm = ConfusionMatrix.binary(tp, fn, fp, tn)
        metric = prioritized_cm_metric(p1)
        moved = apply_cm_transform(cm, CmTransform("uniform-scale", (7.0,)))
        assert abs(metric(cm) - metric(moved)) <= 1e-12

    @given(st.integers(1, 1000), st.integers(1, 1000), st.integers(1, 1000),
           st.integers(1, 1000))
    def test_prevalence_weights_give_accuracy(self, tp, fn, fp, tn):
        cm = ConfusionMatrix.binary(tp, fn, fp, tn)
        assert abs(prevalence_weighted_cm_metric()(cm)
                   - regular_accuracy_cm_metric()(cm)) <= 1e-12


class TestInvariance:
    def test_suite_matches_expectations(self):
        for case, verdict in run_invariance_suite(trials=200, seed=4):
            assert verdict.invariant == case.expect_invariant, verdict
            if not verdict.invariant:
                before, after, v0, v1 = verdict.counterexample
                assert abs(case.metric(before) - v0) == 0 and abs(v0 - v1) > 1e-12

    @pytest.mark.parametrize("metric, t, base, moved, v0, v1", WITNESSES)
    def test_witnesses(self, metric, t, base, moved, v0, v1):
        cm = ConfusionMatrix.binary(*base)
        out = apply_cm_transform(cm, t)
        assert out.cells() == moved
        assert metric(cm) == pytest.approx(v0, abs=1e-15)
        assert metric(out) == pytest.approx(v1, abs=1e-15)

    def test_column_scale_counterexample(self):
        metric, t, base, moved, v0, v1 = I7_COUNTEREXAMPLE
        cm = ConfusionMatrix.binary(*base)
        out = apply_cm_transform(cm, t)
        assert out.cells() == moved
        assert metric(cm) == pytest.approx(19 / 42, abs=1e-15)
        assert metric(out) == pytest.approx(9 / 20, abs=1e-15)
        assert v0 != v1

    def test_fixed_transform(self):
        verdict = check_invariance(prioritized_cm_metric(0.3), CmTransform("uniform-scale", (2,)),
                                   trials=50)
        assert verdict.invariant and verdict.property_name == "I6"

    def test_regular_accuracy_not_row_invariant(self):
        verdict = check_invariance(regular_accuracy_cm_metric(), "row-scale", trials=50)
        assert not verdict.invariant and verdict.transform_params is not None
