import json
import statistics

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from idsbench.arff import NOMINAL, NUMERIC, ArffAttribute, ArffDocument, document_from_rows
from idsbench.errors import AllMissingColumn, DegeneratePartition, LabelNotFound, SchemaMismatch
from idsbench.preprocess import (
    DesignMatrix,
    FeatureSchema,
    apply_schema,
    fit_schema,
    partition,
    partition_document,
)
from idsbench.synthetic import make_document

LABEL = ArffAttribute("class", NOMINAL, ("normal", "anomaly"))
PROTO = ArffAttribute("protocol_type", NOMINAL, ("tcp", "udp", "icmp"))
X = ArffAttribute("x", NUMERIC)


def doc(rows, attrs=(X, PROTO, LABEL)):
    return document_from_rows("t", list(attrs), rows)


def test_mean_ignores_missing():
    schema = fit_schema(doc([[1, "tcp", "normal"], [None, "udp", "anomaly"], [3, "tcp", "normal"]]))
    assert schema.features[0].mean == 2.0


def test_population_std():
    schema = fit_schema(doc([[0, "tcp", "normal"], [10, "udp", "anomaly"]]))
    spec = schema.features[0]
    assert (spec.mean, spec.std) == (5.0, 5.0)


def test_vocabulary_first_appearance_order():
    schema = fit_schema(doc([[0, "udp", "normal"], [1, "icmp", "anomaly"], [2, "udp", "normal"]]))
    assert schema.features[1].vocabulary == ("udp", "icmp")
    assert schema.total_width == 1 + 2


def test_label_vector_attack_positive():
    d = doc([[0, "tcp", "normal"], [1, "tcp", "anomaly"]])
    m = apply_schema(fit_schema(d), d)
    assert m.labels.tolist() == [0, 1]


def test_value_at_mean_scales_to_zero_and_missing_imputed():
    train = doc([[1, "tcp", "normal"], [3, "udp", "anomaly"]])
    schema = fit_schema(train)
    test = doc([[2, "tcp", "normal"], [None, "tcp", "anomaly"]])
    m = apply_schema(schema, test)
    assert m.values[:, 0].tolist() == [0.0, 0.0]


def test_unseen_nominal_gives_zero_block():
    train = doc([[1, "tcp", "normal"], [3, "udp", "anomaly"]])
    schema = fit_schema(train)
    probe = doc([[1, "icmp", "anomaly"]])
    m = apply_schema(schema, probe)
    block = schema.blocks[1]
    assert m.values[0, block.start:block.stop].tolist() == [0.0, 0.0]
    seen = apply_schema(schema, doc([[1, "udp", "anomaly"]]))
    assert seen.values[0, block.start:block.stop].tolist() == [0.0, 1.0]


def test_constant_column_emits_zero():
    d = doc([[0.1, "tcp", "normal"]] * 7 + [[0.1, "udp", "anomaly"]])
    schema = fit_schema(d)
    assert schema.features[0].std == 0.0
    assert not apply_schema(schema, d).values[:, 0].any()


def test_fit_errors():
    d = doc([[1, "tcp", "normal"]])
    with pytest.raises(LabelNotFound):
        fit_schema(d, "label")
    with pytest.raises(LabelNotFound):
        fit_schema(d, "class", "attack")
    with pytest.raises(LabelNotFound):
        fit_schema(d, "x")
    with pytest.raises(AllMissingColumn):
        fit_schema(doc([[None, "tcp", "normal"]]))


def test_schema_mismatch():
    schema = fit_schema(doc([[1, "tcp", "normal"], [2, "udp", "anomaly"]]))
    other = document_from_rows("t", [ArffAttribute("y", NUMERIC), PROTO, LABEL], [[1, "tcp", "normal"]])
    with pytest.raises(SchemaMismatch):
        apply_schema(schema, other)


def test_schema_json_round_trip_is_bit_identical():
    d = make_document(300, seed=3)
    schema = fit_schema(d)
    again = FeatureSchema.from_json(schema.to_json())
    assert again == schema
    assert np.array_equal(apply_schema(again, d).values, apply_schema(schema, d).values)
    payload = json.loads(schema.to_json())
    assert {f["kind"] for f in payload["features"]} == {"numeric", "one_hot"}


def test_apply_does_not_mutate_schema():
    d = make_document(100, seed=1)
    schema = fit_schema(d)
    before = schema.to_json()
    apply_schema(schema, make_document(50, seed=2))
    assert schema.to_json() == before


def test_synthetic_nslkdd_width():
    d = make_document(2000, seed=0)
    schema = fit_schema(d)
    assert len(d.attributes) == 42
    nominal = [f for f in schema.features if f.kind == "one_hot"]
    assert [f.name for f in nominal] == ["protocol_type", "service", "flag", "land", "logged_in",
                                         "is_host_login", "is_guest_login"]
    for f in nominal:
        assert set(f.vocabulary) <= set(d.attribute(f.name).values)


# -- partition ----------------------------------------------------------------

def _matrix(n, positives=None):
    labels = np.zeros(n, dtype=np.int8)
    labels[: (n // 2 if positives is None else positives)] = 1
    return DesignMatrix(np.arange(n, dtype=float)[:, None], labels, np.arange(n) + 1000)


def test_partition_sizes_full_training_file():
    m = _matrix(125_973, positives=58_630)
    train, test = partition(m, 0.7, 42)
    assert (train.n_rows, test.n_rows) == (88_181, 37_792)


def test_partition_even_split():
    m = _matrix(10)
    for seed in range(5):
        train, test = partition(m, 0.5, seed, stratified=False)
        assert (train.n_rows, test.n_rows) == (5, 5)
        assert sorted(np.concatenate([train.provenance, test.provenance])) == list(range(1000, 1010))


def test_partition_deterministic():
    m = _matrix(101)
    a = partition(m, 0.7, 7)
    b = partition(m, 0.7, 7)
    assert np.array_equal(a[0].provenance, b[0].provenance)
    assert np.array_equal(a[1].provenance, b[1].provenance)
    c = partition(m, 0.7, 8)
    assert not np.array_equal(a[0].provenance, c[0].provenance)


def test_partition_degenerate():
    with pytest.raises(DegeneratePartition):
        partition(_matrix(1), 0.7, 1)
    with pytest.raises(DegeneratePartition):
        partition(_matrix(10), 1.0, 1)


def test_partition_document_matches_matrix_partition():
    d = make_document(500, seed=4)
    m = apply_schema(fit_schema(d), d)
    train_doc, test_doc = partition_document(d, seed=11)
    train_m, test_m = partition(m, 0.7, 11)
    assert [d.instances.index(r) for r in train_doc.instances[:5]] == train_m.provenance[:5].tolist()
    assert len(test_doc) == test_m.n_rows


@pytest.mark.criterion("5.preprocessing")
@settings(max_examples=50, deadline=None)
@given(
    n=st.integers(2, 400),
    fraction=st.floats(0.05, 0.95),
    seed=st.integers(0, 2**63),
    stratified=st.booleans(),
    pos_share=st.floats(0.0, 1.0),
)
def test_partition_disjoint_cover(n, fraction, seed, stratified, pos_share):
    m = _matrix(n, positives=int(n * pos_share))
    n_train = int(np.floor(n * fraction))
    if n_train in (0, n):
        with pytest.raises(DegeneratePartition):
            partition(m, fraction, seed, stratified)
        return
    train, test = partition(m, fraction, seed, stratified)
    assert train.n_rows == n_train
    assert sorted(np.concatenate([train.provenance, test.provenance]).tolist()) == m.provenance.tolist()
    if stratified:
        for c in (0, 1):
            total_c = int((m.labels == c).sum())
            expected = total_c * n_train / n
            assert abs(int((train.labels == c).sum()) - expected) <= 1


@st.composite
def numeric_documents(draw):
    n_num = draw(st.integers(1, 4))
    n = draw(st.integers(2, 60))
    attrs = [ArffAttribute(f"n{j}", NUMERIC) for j in range(n_num)] + [PROTO, LABEL]
    value = st.one_of(
        st.floats(-1e6, 1e6, allow_nan=False),
        st.integers(-50, 50).map(float),
        st.sampled_from([0.0, 1.0]),
    )
    rows = []
    for _ in range(n):
        rows.append([draw(value) for _ in range(n_num)]
                    + [draw(st.sampled_from(PROTO.values)), draw(st.sampled_from(LABEL.values))])
    return doc(rows, attrs)


@pytest.mark.criterion("5.preprocessing")
@settings(max_examples=50, deadline=None)
@given(numeric_documents())
def test_scaled_training_columns_standardized(d):
    schema = fit_schema(d)
    m = apply_schema(schema, d)
    assert np.isfinite(m.values).all()
    for spec, block in zip(schema.features, schema.blocks):
        if spec.kind != "numeric":
            continue
        col = m.values[:, block.start]
        raw = [r[d.attribute_index(spec.name)] for r in d.instances]
        # independent oracle: stdlib statistics on the raw column
        assert spec.mean == pytest.approx(statistics.fmean(raw), rel=1e-12, abs=1e-9)
        if spec.std == 0:
            assert not col.any()
        else:
            assert spec.std == pytest.approx(statistics.pstdev(raw), rel=1e-9)
            assert abs(col.mean()) <= 1e-9
            assert abs(col.std() - 1.0) <= 1e-9
            refit = fit_schema(document_from_rows("s", [X, PROTO, LABEL],
                                                  [[v, "tcp", "normal"] for v in col]))
            assert abs(refit.features[0].mean) <= 1e-9
            assert abs(refit.features[0].std - 1.0) <= 1e-9


@pytest.mark.criterion("5.preprocessing")
@settings(max_examples=30, deadline=None)
@given(st.lists(st.sampled_from(["tcp", "udp", "icmp", None]), min_size=1, max_size=30), st.integers(0, 1000))
def test_unseen_or_missing_nominal_zero_block(values, seed):
    train = doc([[1, "tcp", "normal"], [2, "tcp", "anomaly"]])
    schema = fit_schema(train)
    probe = doc([[seed, v, "normal"] for v in values])
    m = apply_schema(schema, probe)
    block = schema.blocks[1]
    for v, row in zip(values, m.values):
        expected = [1.0] if v == "tcp" else [0.0]
        assert row[block.start:block.stop].tolist() == expected
