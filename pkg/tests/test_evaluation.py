from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from idsbench.arff import ArffAttribute
from idsbench.classifiers import TrainedModel, default_spec
from idsbench.errors import EmptyEvaluation, SchemaMismatch, WidthMismatch
from idsbench.evaluation import (
    AlertKind,
    ConfusionCounts,
    ProtocolResult,
    accuracy,
    classify_alert,
    evaluate,
    per_class_rows,
    results_from_json,
    results_to_json,
    run_protocol_cross,
    run_protocol_split,
)
from idsbench.preprocess import DesignMatrix
from idsbench.synthetic import make_document


@pytest.mark.parametrize(
    "predicted, actual, kind",
    [
        (1, 1, AlertKind.TRUE_POSITIVE),
        (1, 0, AlertKind.FALSE_POSITIVE),
        (0, 0, AlertKind.TRUE_NEGATIVE),
        (0, 1, AlertKind.FALSE_NEGATIVE),
    ],
)
def test_classify_alert(predicted, actual, kind):
    assert classify_alert(predicted, actual) is kind


def test_accuracy_examples():
    assert accuracy(ConfusionCounts(17537, 30, 20191, 34)) == pytest.approx(0.99831, abs=5e-6)
    assert round(accuracy(ConfusionCounts(17537, 30, 20191, 34)), 3) == 0.998
    assert round(accuracy(ConfusionCounts(9698, 2885, 7873, 3088)), 4) == 0.7463
    with pytest.raises(EmptyEvaluation):
        accuracy(ConfusionCounts(0, 0, 0, 0))


def test_per_class_rows_match_table_layout():
    attack, normal = per_class_rows(ConfusionCounts(17537, 30, 20191, 34))
    assert attack == (17537, 30, 20191, 34)
    assert normal == (20191, 34, 17537, 30)


def test_counts_reject_negative():
    with pytest.raises(ValueError):
        ConfusionCounts(-1, 0, 0, 0)


class _Constant:
    def __init__(self, value):
        self.value = value

    def scores(self, x):
        return np.full(x.shape[0], self.value)


class _Oracle:
    def __init__(self, truth):
        self.truth = truth

    def scores(self, x):
        return self.truth[x[:, 0].astype(int)].astype(float)


def _matrix(labels):
    labels = np.asarray(labels, dtype=np.int8)
    return DesignMatrix.from_arrays(np.arange(len(labels), dtype=float)[:, None], labels)


def test_perfect_model_has_no_errors():
    labels = np.array([1, 0, 0, 1, 1, 0, 1])
    model = TrainedModel(default_spec("knn"), 1, _Oracle(labels))
    counts = evaluate(model, _matrix(labels))
    assert counts.fp == counts.fn == 0
    assert counts.total == len(labels)


def test_constant_attack_model():
    labels = [1, 1, 1, 0, 0]
    model = TrainedModel(default_spec("knn"), 1, _Constant(0.9))
    assert evaluate(model, _matrix(labels)).as_tuple() == (3, 2, 0, 0)


def test_evaluate_width_mismatch():
    model = TrainedModel(default_spec("knn"), 3, _Constant(0.1))
    with pytest.raises(WidthMismatch):
        evaluate(model, _matrix([0, 1]))


counts_strategy = st.builds(
    ConfusionCounts,
    st.integers(0, 10**6),
    st.integers(0, 10**6),
    st.integers(0, 10**6),
    st.integers(0, 10**6),
)


@pytest.mark.criterion("5.confusion_algebra")
@settings(max_examples=1000, deadline=None)
@given(counts_strategy)
def test_confusion_algebra(counts):
    assert counts.total == sum(counts.as_tuple())
    swapped = counts.swapped()
    assert swapped.total == counts.total
    assert swapped.swapped() == counts
    if counts.total == 0:
        with pytest.raises(EmptyEvaluation):
            accuracy(counts)
        return
    exact = Fraction(counts.tp + counts.tn, counts.total)
    assert accuracy(counts) == float(exact)
    assert accuracy(swapped) == accuracy(counts)
    assert 0.0 <= accuracy(counts) <= 1.0


@pytest.mark.criterion("5.confusion_algebra")
@settings(max_examples=1000, deadline=None)
@given(st.lists(st.tuples(st.booleans(), st.booleans()), max_size=60))
def test_counts_from_predictions_conserve_rows(pairs):
    predicted = [int(p) for p, _ in pairs]
    actual = [int(a) for _, a in pairs]
    counts = ConfusionCounts.from_predictions(predicted, actual)
    assert counts.total == len(pairs)
    kinds = [classify_alert(p, a) for p, a in zip(predicted, actual)]
    assert counts.tp == kinds.count(AlertKind.TRUE_POSITIVE)
    assert counts.fp == kinds.count(AlertKind.FALSE_POSITIVE)
    assert counts.tn == kinds.count(AlertKind.TRUE_NEGATIVE)
    assert counts.fn == kinds.count(AlertKind.FALSE_NEGATIVE)


# -- protocols ----------------------------------------------------------------

SPECS = [default_spec("decision_tree"), default_spec("naive_bayes"), default_spec("knn")]


def test_split_protocol_deterministic_and_sized():
    doc = make_document(400, seed=0)
    a = run_protocol_split(doc, SPECS, 0.7, 42)
    b = run_protocol_split(doc, SPECS, 0.7, 42, threads=3)
    assert [r.algorithm for r in a] == ["decision_tree", "naive_bayes", "knn"]
    assert results_to_json(a, durations=False) == results_to_json(b, durations=False)
    for r in a:
        assert (r.n_train, r.n_test) == (280, 120)
        assert r.counts.total == 120
        assert r.protocol == "split"
        assert r.accuracy == (r.counts.tp + r.counts.tn) / r.counts.total


def test_split_seed_changes_partition():
    doc = make_document(400, seed=0)
    a = run_protocol_split(doc, SPECS[:1], 0.7, 1)
    b = run_protocol_split(doc, SPECS[:1], 0.7, 2)
    assert a[0].counts != b[0].counts


def test_cross_protocol_and_novelty_degrades():
    train_doc = make_document(600, seed=1)
    test_doc = make_document(300, seed=2, novelty=0.6, relation="KDDTest")
    split = run_protocol_split(train_doc, SPECS, 0.7, 42)
    cross = run_protocol_cross(train_doc, test_doc, SPECS)
    for s, c in zip(split, cross):
        assert c.protocol == "cross" and c.counts.total == 300 and c.n_train == 600
        assert c.accuracy < s.accuracy


def test_cross_protocol_rejects_different_attributes():
    train_doc = make_document(50, seed=1)
    test_doc = make_document(50, seed=2)
    attrs = list(test_doc.attributes)
    attrs[0] = ArffAttribute("elapsed", "numeric")
    renamed = type(test_doc)(test_doc.relation_name, tuple(attrs), test_doc.instances)
    with pytest.raises(SchemaMismatch):
        run_protocol_cross(train_doc, renamed, SPECS[:1])


def test_results_json_round_trip():
    results = run_protocol_split(make_document(200, seed=3), SPECS[:2], 0.7, 42)
    text = results_to_json(results)
    again = results_from_json(text)
    assert results_to_json(again) == text
    stripped = results_to_json(results, durations=False)
    assert "train_seconds" not in stripped and "train_seconds" in text
    assert isinstance(again[0], ProtocolResult)
