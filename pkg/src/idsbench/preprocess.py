"""Turn ARFF documents into dense design matrices.

Numeric features are mean-imputed and z-scaled, nominal features are
one-hot encoded over the training vocabulary, and the label column becomes
a 0/1 vector with the attack class as 1. All parameters are fitted on the
training document only and stored in a :class:`FeatureSchema`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ._random import derive_rng, stratified_allocation
from .arff import ArffDocument
from .errors import (
    AllMissingColumn,
    DegeneratePartition,
    LabelNotFound,
    PreprocessError,
    SchemaMismatch,
)

SCHEMA_FORMAT_VERSION = 1

NUMERIC = "numeric"
ONE_HOT = "one_hot"


@dataclass(frozen=True)
class FeatureSpec:
    name: str
    kind: str
    mean: float = 0.0
    std: float = 0.0
    vocabulary: tuple[str, ...] = ()

    @property
    def width(self) -> int:
        return 1 if self.kind == NUMERIC else len(self.vocabulary)


@dataclass(frozen=True)
class ColumnBlock:
    """A contiguous run of design-matrix columns produced by one attribute."""

    name: str
    kind: str
    start: int
    width: int

    @property
    def stop(self) -> int:
        return self.start + self.width


@dataclass(frozen=True)
class FeatureSchema:
    label_attribute: str
    positive_label: str
    features: tuple[FeatureSpec, ...]
    # (name, "numeric" | "nominal") for every attribute of the source document
    source_attributes: tuple[tuple[str, str], ...]

    @property
    def total_width(self) -> int:
        return sum(f.width for f in self.features)

    @property
    def blocks(self) -> tuple[ColumnBlock, ...]:
        out, start = [], 0
        for f in self.features:
            out.append(ColumnBlock(f.name, f.kind, start, f.width))
            start += f.width
        return tuple(out)

    def column_names(self) -> list[str]:
        names = []
        for f in self.features:
            if f.kind == NUMERIC:
                names.append(f.name)
            else:
                names.extend(f"{f.name}={v}" for v in f.vocabulary)
        return names

    def to_json(self) -> str:
        payload = {
            "format_version": SCHEMA_FORMAT_VERSION,
            "label_attribute": self.label_attribute,
            "positive_label": self.positive_label,
            "source_attributes": [list(a) for a in self.source_attributes],
            "features": [
                {"name": f.name, "kind": f.kind, "mean": f.mean, "std": f.std}
                if f.kind == NUMERIC
                else {"name": f.name, "kind": f.kind, "vocabulary": list(f.vocabulary)}
                for f in self.features
            ],
        }
        return json.dumps(payload, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "FeatureSchema":
        payload = json.loads(text)
        if payload.get("format_version") != SCHEMA_FORMAT_VERSION:
            raise PreprocessError(
                f"unsupported schema format version {payload.get('format_version')!r}"
            )
        features = []
        for f in payload["features"]:
            if f["kind"] == NUMERIC:
                features.append(FeatureSpec(f["name"], NUMERIC, float(f["mean"]), float(f["std"])))
            else:
                features.append(FeatureSpec(f["name"], ONE_HOT, vocabulary=tuple(f["vocabulary"])))
        return cls(
            payload["label_attribute"],
            payload["positive_label"],
            tuple(features),
            tuple((a[0], a[1]) for a in payload["source_attributes"]),
        )


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    values: np.ndarray  # (n, width) float64
    labels: np.ndarray  # (n,) int8, 1 = attack
    provenance: np.ndarray  # (n,) int64 row indices in the source document
    blocks: tuple[ColumnBlock, ...] = field(default=())

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        labels = np.ascontiguousarray(self.labels, dtype=np.int8)
        provenance = np.ascontiguousarray(self.provenance, dtype=np.int64)
        if values.ndim != 2:
            raise ValueError("values must be 2-D")
        if labels.shape != (values.shape[0],) or provenance.shape != labels.shape:
            raise ValueError("labels/provenance length must equal the row count")
        blocks = self.blocks or tuple(
            ColumnBlock(f"x{j}", NUMERIC, j, 1) for j in range(values.shape[1])
        )
        for arr in (values, labels, provenance):
            arr.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "provenance", provenance)
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def from_arrays(cls, values, labels, blocks=()) -> "DesignMatrix":
        values = np.asarray(values, dtype=np.float64)
        return cls(values, labels, np.arange(values.shape[0]), tuple(blocks))

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    def take(self, rows: np.ndarray) -> "DesignMatrix":
        rows = np.asarray(rows, dtype=np.int64)
        return DesignMatrix(self.values[rows], self.labels[rows], self.provenance[rows], self.blocks)


def _label_index(doc: ArffDocument, label_attribute: str, positive_label: str) -> int:
    try:
        idx = doc.attribute_index(label_attribute)
    except KeyError:
        raise LabelNotFound(f"label attribute {label_attribute!r} not in document") from None
    attr = doc.attributes[idx]
    if not attr.is_nominal:
        raise LabelNotFound(f"label attribute {label_attribute!r} is not nominal")
    if positive_label not in attr.values:
        raise LabelNotFound(f"{positive_label!r} is not a value of {label_attribute!r}")
    return idx


def _numeric_column(doc: ArffDocument, j: int) -> np.ndarray:
    return np.fromiter(
        (np.nan if row[j] is None else row[j] for row in doc.instances),
        dtype=np.float64,
        count=len(doc.instances),
    )


def _nominal_column(doc: ArffDocument, j: int) -> np.ndarray:
    return np.fromiter(
        (-1 if row[j] is None else row[j] for row in doc.instances),
        dtype=np.int64,
        count=len(doc.instances),
    )


def fit_schema(
    train: ArffDocument, label_attribute: str = "class", positive_label: str = "anomaly"
) -> FeatureSchema:
    """Learn imputation, encoding and scaling parameters from ``train``."""
    label_idx = _label_index(train, label_attribute, positive_label)
    features = []
    for j, attr in enumerate(train.attributes):
        if j == label_idx:
            continue
        if attr.is_nominal:
            codes = _nominal_column(train, j)
            seen = codes[codes >= 0]
            # first-appearance order
            _, first = np.unique(seen, return_index=True)
            vocab = tuple(attr.values[seen[i]] for i in np.sort(first))
            features.append(FeatureSpec(attr.name, ONE_HOT, vocabulary=vocab))
        else:
            col = _numeric_column(train, j)
            observed = col[~np.isnan(col)]
            if observed.size == 0:
                raise AllMissingColumn(f"numeric column {attr.name!r} has no observed values")
            mean = float(np.mean(observed))
            # exact zero for constant columns; np.std can leave rounding residue
            if observed.min() == observed.max():
                mean, std = float(observed[0]), 0.0
            else:
                std = float(np.std(observed))
            features.append(FeatureSpec(attr.name, NUMERIC, mean, std))
    return FeatureSchema(
        label_attribute,
        positive_label,
        tuple(features),
        tuple((a.name, a.kind) for a in train.attributes),
    )


def apply_schema(schema: FeatureSchema, doc: ArffDocument, *, require_labels: bool = True) -> DesignMatrix:
    """Encode ``doc`` with the fitted ``schema``.

    With ``require_labels=False`` a missing class value is tolerated and its
    label is set to 0 (used when scoring unlabeled traffic).
    """
    doc_attrs = tuple((a.name, a.kind) for a in doc.attributes)
    if doc_attrs != schema.source_attributes:
        expected = dict(schema.source_attributes)
        got = dict(doc_attrs)
        diff = sorted(set(expected.items()) ^ set(got.items()))
        raise SchemaMismatch(f"document attributes differ from the schema: {diff[:6]}")

    n = len(doc.instances)
    label_idx = _label_index(doc, schema.label_attribute, schema.positive_label)
    out = np.zeros((n, schema.total_width), dtype=np.float64)
    col = 0
    for spec in schema.features:
        j = doc.attribute_index(spec.name)
        if spec.kind == NUMERIC:
            values = _numeric_column(doc, j)
            if spec.std > 0:
                scaled = (values - spec.mean) / spec.std
            else:
                scaled = np.zeros(n)
            scaled[np.isnan(values)] = 0.0
            out[:, col] = scaled
            col += 1
        else:
            attr = doc.attributes[j]
            position = {v: i for i, v in enumerate(spec.vocabulary)}
            # document code -> vocabulary slot, -1 for values never seen in training
            remap = np.array([position.get(v, -1) for v in attr.values] + [-1], dtype=np.int64)
            slots = remap[_nominal_column(doc, j)]  # missing (-1) hits the trailing -1
            hit = np.flatnonzero(slots >= 0)
            out[hit, col + slots[hit]] = 1.0
            col += spec.width

    label_attr = doc.attributes[label_idx]
    pos_code = label_attr.index_of(schema.positive_label)
    codes = _nominal_column(doc, label_idx)
    if require_labels and (codes < 0).any():
        first = int(np.flatnonzero(codes < 0)[0])
        raise PreprocessError(f"row {first} has a missing {schema.label_attribute!r} value")
    labels = (codes == pos_code).astype(np.int8)
    return DesignMatrix(out, labels, np.arange(n), schema.blocks)


def partition(
    matrix: DesignMatrix, train_fraction: float = 0.7, seed: int = 42, stratified: bool = True
) -> tuple[DesignMatrix, DesignMatrix]:
    """Shuffle-split ``matrix`` into floor(n * fraction) training rows and the rest."""
    if not 0.0 < train_fraction < 1.0:
        raise DegeneratePartition(f"train_fraction must lie in (0, 1), got {train_fraction}")
    n = matrix.n_rows
    n_train = int(np.floor(n * train_fraction))
    if n_train == 0 or n_train == n:
        raise DegeneratePartition(f"a {train_fraction} split of {n} rows leaves an empty part")
    rng = derive_rng(seed, "partition")
    if stratified:
        classes = np.unique(matrix.labels)
        groups = [np.flatnonzero(matrix.labels == c) for c in classes]
        alloc = stratified_allocation(np.array([len(g) for g in groups]), n_train)
        train_parts, test_parts = [], []
        for g, k in zip(groups, alloc):
            shuffled = rng.permutation(g)
            train_parts.append(shuffled[:k])
            test_parts.append(shuffled[k:])
        train_rows = rng.permutation(np.concatenate(train_parts))
        test_rows = rng.permutation(np.concatenate(test_parts))
    else:
        perm = rng.permutation(n)
        train_rows, test_rows = perm[:n_train], perm[n_train:]
    return matrix.take(train_rows), matrix.take(test_rows)


def take_document(doc: ArffDocument, rows) -> ArffDocument:
    """Sub-document holding ``rows`` of ``doc`` in the given order."""
    return ArffDocument(doc.relation_name, doc.attributes, tuple(doc.instances[int(i)] for i in rows))


def partition_document(
    doc: ArffDocument,
    label_attribute: str = "class",
    positive_label: str = "anomaly",
    train_fraction: float = 0.7,
    seed: int = 42,
    stratified: bool = True,
) -> tuple[ArffDocument, ArffDocument]:
    """Split a raw document with the same row assignment :func:`partition` uses.

    Lets the split protocol fit its schema on the training part alone.
    """
    label_idx = _label_index(doc, label_attribute, positive_label)
    pos = doc.attributes[label_idx].index_of(positive_label)
    labels = (_nominal_column(doc, label_idx) == pos).astype(np.int8)
    index_matrix = DesignMatrix(np.zeros((len(doc), 0)), labels, np.arange(len(doc)), ())
    train, test = partition(index_matrix, train_fraction, seed, stratified)
    return take_document(doc, train.provenance), take_document(doc, test.provenance)
