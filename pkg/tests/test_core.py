import numpy as np
import pytest
from hypothesis import given, settings

from haccuracy.core import (
    ComplexityAssignment,
    ConfusionMatrix,
    Dataset,
    Instance,
    LabelSet,
    PenaltySpec,
    PriorityVector,
    argmax_label,
    confusion_matrix,
    validate_dataset,
)
from haccuracy.errors import (
    EmptyClass,
    InvalidComplexity,
    InvalidPriorities,
    MissingComplexity,
    NotBinary,
    TauBelowChance,
    TauOutOfRange,
    ValidationError,
)

from conftest import datasets, make_dataset

BIN = LabelSet(("neg", "pos"))


class TestLabelSet:
    def test_order_and_index(self):
        ls = LabelSet(("a", "b", "c"))
        assert ls.k == 3 and list(ls) == ["a", "b", "c"] and ls.index("c") == 2

    @pytest.mark.parametrize("labels", [("a",), ("a", "a"), ("a", "")])
    def test_rejects(self, labels):
        with pytest.raises(ValueError):
            LabelSet(labels)


class TestValidateDataset:
    def test_accepts_normalized(self):
        ds = make_dataset(("neg", "pos"), [("x1", "neg", (0.7, 0.3))])
        assert validate_dataset(ds) is ds

    @pytest.mark.parametrize("rows, code", [
        ([("x1", "neg", (1.2, 0.0))], "ScoreOutOfRange"),
        ([("x1", "neg", (0.7, 0.3)), ("x1", "pos", (0.2, 0.8))], "DuplicateId"),
        ([("x1", "neg", (0.7, 0.4))], "ScoresNotNormalized"),
        ([("x1", "neg", (0.7, 0.2, 0.1))], "ScoreArity"),
    ])
    def test_violations(self, rows, code):
        with pytest.raises(ValidationError) as info:
            validate_dataset(Dataset(BIN, [Instance(*r) for r in rows]))
        assert code in info.value.codes

    def test_unknown_label_and_empty(self):
        with pytest.raises(ValidationError) as info:
            validate_dataset(Dataset(BIN, [Instance("x1", "maybe", (0.5, 0.5))]))
        assert "UnknownLabel" in info.value.codes
        with pytest.raises(ValidationError) as info:
            validate_dataset(Dataset(BIN, []))
        assert info.value.codes == {"EmptyDataset"}

    def test_reports_every_violation(self):
        rows = [("x1", "neg", (1.2, 0.0)), ("x1", "pos", (0.6, 0.6))]
        with pytest.raises(ValidationError) as info:
            validate_dataset(Dataset(BIN, [Instance(*r) for r in rows]))
        assert info.value.codes == {"ScoreOutOfRange", "DuplicateId", "ScoresNotNormalized"}

    def test_raw_mode_skips_sum(self):
        ds = make_dataset(("neg", "pos"), [("x1", "neg", (0.7, 0.4))])
        assert validate_dataset(ds, "raw") is ds

    @given(datasets())
    @settings(max_examples=30, deadline=None)
    def test_idempotent(self, ds):
        assert validate_dataset(validate_dataset(ds)) is ds


@pytest.mark.parametrize("scores, labels, expected", [
    ((0.2, 0.8), ("neg", "pos"), "pos"),
    ((0.5, 0.5), ("neg", "pos"), "neg"),
    ((0.1, 0.1, 0.8), ("a", "b", "c"), "c"),
    ((0.4, 0.4, 0.2), ("a", "b", "c"), "a"),
])
def test_argmax_label(scores, labels, expected):
    assert argmax_label(scores, LabelSet(labels)) == expected


@given(datasets())
@settings(max_examples=30, deadline=None)
def test_argmax_agrees_with_dataset_prediction(ds):
    expected = [argmax_label(x.scores, ds.label_set) for x in ds.instances]
    assert [ds.label_set.labels[i] for i in ds.predicted] == expected


class TestConfusionMatrix:
    def test_perfect_classifier_diagonal(self):
        rows = [("a", "neg", (0.9, 0.1)), ("b", "neg", (0.8, 0.2)),
                ("c", "pos", (0.3, 0.7)), ("d", "pos", (0.1, 0.9))]
        cm = confusion_matrix(make_dataset(("neg", "pos"), rows))
        assert np.array_equal(cm.counts, np.diag([2.0, 2.0]))

    def test_empty_class_row(self):
        rows = [("a", "neg", (0.9, 0.1)), ("b", "neg", (0.2, 0.8))]
        cm = confusion_matrix(make_dataset(("neg", "pos"), rows))
        assert cm.counts[1].sum() == 0

    def test_e1_cells(self, e1):
        assert confusion_matrix(e1).cells() == (1, 1, 1, 1)

    def test_binary_layout(self):
        cm = ConfusionMatrix.binary(tp=1, fn=2, fp=3, tn=4)
        assert (cm.tp, cm.fn, cm.fp, cm.tn) == (1, 2, 3, 4)
        assert cm.total == 10

    @pytest.mark.parametrize("counts", [[[1, -1], [0, 1]], [[0, 0], [0, 0]]])
    def test_rejects(self, counts):
        with pytest.raises(ValueError):
            ConfusionMatrix(np.array(counts, dtype=float))

    @given(datasets())
    @settings(max_examples=30, deadline=None)
    def test_total_equals_size(self, ds):
        assert confusion_matrix(ds).total == len(ds)


class TestPriorityVector:
    def test_uniform(self):
        assert PriorityVector.uniform(LabelSet(("a", "b", "c", "d"))).as_array(
            LabelSet(("a", "b", "c", "d"))).tolist() == [0.25] * 4

    @pytest.mark.parametrize("weights", [{"neg": 0.6, "pos": 0.6}, {"neg": -0.5, "pos": 1.5}])
    def test_rejects(self, weights):
        with pytest.raises(InvalidPriorities):
            PriorityVector(weights)

    def test_coverage_checked(self):
        with pytest.raises(InvalidPriorities):
            PriorityVector({"neg": 0.5, "other": 0.5}).as_array(BIN)

    def test_binary_needs_two_labels(self):
        with pytest.raises(NotBinary):
            PriorityVector.binary(0.5, LabelSet(("a", "b", "c")))


class TestComplexityAssignment:
    def test_const_and_map(self, e1):
        assert ComplexityAssignment.const(0.5).weights_for(e1).tolist() == [0.5] * 4
        values = {"x1": 0.0, "x2": 1.0, "x3": 0.5, "x4": 0.25}
        assert ComplexityAssignment(values).weights_for(e1).tolist() == [0.0, 1.0, 0.5, 0.25]

    def test_missing(self, e1):
        with pytest.raises(MissingComplexity):
            ComplexityAssignment({"x1": 1.0}).weights_for(e1)

    @pytest.mark.parametrize("kwargs", [{"values": {"x": 1.5}}, {"constant": 0.0}, {}])
    def test_rejects(self, kwargs):
        with pytest.raises(InvalidComplexity):
            ComplexityAssignment(**kwargs)


@pytest.mark.parametrize("kind, tau, k, error", [
    ("standard", 0.4, 2, TauBelowChance),
    ("standard", 1.01, 2, TauOutOfRange),
    ("risk", 0.0, 2, TauOutOfRange),
    ("risk", 1.0, 2, TauOutOfRange),
    ("risk", 0.5, 3, NotBinary),
])
def test_penalty_spec_rejects(kind, tau, k, error):
    with pytest.raises(error):
        PenaltySpec(kind, tau).check(k)


def test_require_all_classes():
    ds = make_dataset(("neg", "pos"), [("a", "neg", (0.9, 0.1))])
    with pytest.raises(EmptyClass):
        ds.require_all_classes()


def test_dataset_arrays_read_only(e1):
    with pytest.raises(ValueError):
        e1.scores[0, 0] = 0.0
