"""Alert taxonomy, confusion counts and the two benchmark protocols.

The attack (anomaly) class is positive throughout. The normal-class view
of a result is derived by :func:`per_class_rows`, never recounted.
"""

from __future__ import annotations

import enum
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .arff import ArffDocument
from .classifiers import AlgorithmSpec, TrainedModel, train
from .errors import EmptyEvaluation, SchemaMismatch
from .preprocess import DesignMatrix, apply_schema, fit_schema, partition_document

log = logging.getLogger(__name__)

SPLIT = "split"
CROSS = "cross"


class AlertKind(enum.Enum):
    TRUE_POSITIVE = "true_positive"
    FALSE_POSITIVE = "false_positive"
    TRUE_NEGATIVE = "true_negative"
    FALSE_NEGATIVE = "false_negative"


def classify_alert(predicted: int, actual: int) -> AlertKind:
    if predicted:
        return AlertKind.TRUE_POSITIVE if actual else AlertKind.FALSE_POSITIVE
    return AlertKind.FALSE_NEGATIVE if actual else AlertKind.TRUE_NEGATIVE


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int
    positive_class: str = "attack"

    def __post_init__(self):
        for name in ("tp", "fp", "tn", "fn"):
            value = getattr(self, name)
            if int(value) != value or value < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {value!r}")
            object.__setattr__(self, name, int(value))

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.tp, self.fp, self.tn, self.fn)

    def swapped(self) -> "ConfusionCounts":
        other = "normal" if self.positive_class == "attack" else "attack"
        return ConfusionCounts(self.tn, self.fn, self.tp, self.fp, other)

    @classmethod
    def from_predictions(cls, predicted, actual) -> "ConfusionCounts":
        p = np.asarray(predicted).astype(bool)
        a = np.asarray(actual).astype(bool)
        if p.shape != a.shape:
            raise ValueError("prediction and truth vectors differ in length")
        return cls(
            int(np.count_nonzero(p & a)),
            int(np.count_nonzero(p & ~a)),
            int(np.count_nonzero(~p & ~a)),
            int(np.count_nonzero(~p & a)),
        )


def accuracy(counts: ConfusionCounts) -> float:
    if counts.total == 0:
        raise EmptyEvaluation("accuracy of an empty evaluation is undefined")
    return (counts.tp + counts.tn) / counts.total


def per_class_rows(counts: ConfusionCounts) -> tuple[tuple[int, int, int, int], tuple[int, int, int, int]]:
    """(attack_row, normal_row) as laid out in the results tables."""
    return counts.as_tuple(), counts.swapped().as_tuple()


def evaluate(model: TrainedModel, test: DesignMatrix) -> ConfusionCounts:
    predicted, _ = model.predict_batch(test.values)
    return ConfusionCounts.from_predictions(predicted, test.labels)


@dataclass(frozen=True)
class ProtocolResult:
    algorithm: str
    protocol: str
    counts: ConfusionCounts
    spec: AlgorithmSpec
    train_seconds: float = 0.0
    test_seconds: float = 0.0
    n_train: int = 0
    n_test: int = 0
    extras: dict = field(default_factory=dict)

    @property
    def accuracy(self) -> float:
        return accuracy(self.counts)

    @property
    def seed(self) -> int:
        return self.spec.seed

    def to_dict(self, *, durations: bool = True) -> dict:
        record = {
            "algorithm": self.algorithm,
            "protocol": self.protocol,
            "spec": self.spec.to_dict(),
            "seed": self.seed,
            "counts": {"tp": self.counts.tp, "fp": self.counts.fp, "tn": self.counts.tn, "fn": self.counts.fn},
            "accuracy": self.accuracy,
            "n_train": self.n_train,
            "n_test": self.n_test,
        }
        if durations:
            record["durations"] = {"train_seconds": self.train_seconds, "test_seconds": self.test_seconds}
        return record

    @classmethod
    def from_dict(cls, record: dict) -> "ProtocolResult":
        c = record["counts"]
        durations = record.get("durations", {})
        return cls(
            record["algorithm"],
            record["protocol"],
            ConfusionCounts(c["tp"], c["fp"], c["tn"], c["fn"]),
            AlgorithmSpec.from_dict(record["spec"]),
            durations.get("train_seconds", 0.0),
            durations.get("test_seconds", 0.0),
            record.get("n_train", 0),
            record.get("n_test", 0),
        )


def results_to_json(results: Sequence[ProtocolResult], *, durations: bool = True) -> str:
    return json.dumps([r.to_dict(durations=durations) for r in results], indent=2)


def results_from_json(text: str) -> list[ProtocolResult]:
    return [ProtocolResult.from_dict(r) for r in json.loads(text)]


def _run_one(spec: AlgorithmSpec, protocol: str, train_m: DesignMatrix, test_m: DesignMatrix) -> ProtocolResult:
    log.info("%s/%s: training on %d rows", protocol, spec.algorithm, train_m.n_rows)
    t0 = time.perf_counter()
    model = train(spec, train_m)
    t1 = time.perf_counter()
    counts = evaluate(model, test_m)
    t2 = time.perf_counter()
    result = ProtocolResult(spec.algorithm, protocol, counts, spec, t1 - t0, t2 - t1, train_m.n_rows, test_m.n_rows)
    log.info("%s/%s: accuracy %.4f (train %.1fs, test %.1fs)", protocol, spec.algorithm, result.accuracy, t1 - t0, t2 - t1)
    return result


def run_specs(
    specs: Sequence[AlgorithmSpec],
    protocol: str,
    train_m: DesignMatrix,
    test_m: DesignMatrix,
    threads: int = 1,
) -> list[ProtocolResult]:
    """Train and evaluate every spec on the same matrices; results keep ``specs`` order."""
    if threads <= 1 or len(specs) <= 1:
        return [_run_one(s, protocol, train_m, test_m) for s in specs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(_run_one, s, protocol, train_m, test_m) for s in specs]
        return [f.result() for f in futures]


def run_protocol_split(
    doc: ArffDocument,
    specs: Sequence[AlgorithmSpec],
    fraction: float = 0.7,
    seed: int = 42,
    *,
    stratified: bool = True,
    label_attribute: str = "class",
    positive_label: str = "anomaly",
    threads: int = 1,
) -> list[ProtocolResult]:
    """Train on a ``fraction`` partition of ``doc`` and test on the remainder."""
    train_doc, test_doc = partition_document(doc, label_attribute, positive_label, fraction, seed, stratified)
    schema = fit_schema(train_doc, label_attribute, positive_label)
    train_m = apply_schema(schema, train_doc)
    test_m = apply_schema(schema, test_doc)
    return run_specs(specs, SPLIT, train_m, test_m, threads)


def run_protocol_cross(
    train_doc: ArffDocument,
    test_doc: ArffDocument,
    specs: Sequence[AlgorithmSpec],
    *,
    label_attribute: str = "class",
    positive_label: str = "anomaly",
    threads: int = 1,
) -> list[ProtocolResult]:
    """Train on all of ``train_doc`` and test on all of ``test_doc``."""
    train_attrs = [(a.name, a.kind) for a in train_doc.attributes]
    test_attrs = [(a.name, a.kind) for a in test_doc.attributes]
    if train_attrs != test_attrs:
        raise SchemaMismatch("training and test documents declare different attributes")
    schema = fit_schema(train_doc, label_attribute, positive_label)
    train_m = apply_schema(schema, train_doc)
    test_m = apply_schema(schema, test_doc)
    return run_specs(specs, CROSS, train_m, test_m, threads)
