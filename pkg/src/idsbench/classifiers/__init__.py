"""Uniform train/predict interface over the seven benchmark algorithms."""

from __future__ import annotations

import io
import json
import os
import zipfile
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..errors import BadHyperparameter, ModelFormatError, SingleClassData, WidthMismatch
from ..preprocess import DesignMatrix
from .bayes import NaiveBayesModel
from .decision_tree import DecisionTreeModel
from .forest import RandomForestModel
from .gbt import GradientBoostedTreesModel
from .knn import KnnModel
from .pnn import SIGMA_GRID, PnnModel
from .svm import LinearSvmModel

MODEL_FORMAT_VERSION = 1

ALGORITHMS = ("decision_tree", "random_forest", "naive_bayes", "svm", "pnn", "gbt", "knn")

DISPLAY_NAMES = {
    "decision_tree": "Decision Tree",
    "random_forest": "Random Forest",
    "naive_bayes": "Naive Bayes",
    "svm": "Support Vector Machine (SVM)",
    "pnn": "Probabilistic Neural Network (PNN)",
    "gbt": "Gradient Boosted Trees",
    "knn": "K Nearest Neighbor",
}

_TREE_DEFAULTS = {"max_depth": 30, "min_node_size": 2, "criterion": "gini"}

DEFAULTS: dict[str, dict[str, Any]] = {
    "decision_tree": dict(_TREE_DEFAULTS),
    "random_forest": {"trees": 100, "bootstrap": True, "features_per_split": "sqrt", **_TREE_DEFAULTS},
    "naive_bayes": {"laplace_alpha": 1.0, "variance_floor": 1e-9},
    "svm": {"lambda": 1e-5, "epochs": 10, "subsample_cap": 20000},
    "pnn": {"sigma": "auto", "pattern_cap": 20000},
    "gbt": {"rounds": 100, "learning_rate": 0.1, "tree_depth": 4, "min_node_size": 2},
    "knn": {"k": 3, "reference_cap": 20000},
}

# hyperparameters that subsample the training data; ``no_cap`` sets them to None
CAP_KEYS = {"svm": "subsample_cap", "pnn": "pattern_cap", "knn": "reference_cap"}

_MODEL_CLASSES = {
    cls.algorithm: cls
    for cls in (
        DecisionTreeModel,
        RandomForestModel,
        NaiveBayesModel,
        LinearSvmModel,
        PnnModel,
        GradientBoostedTreesModel,
        KnnModel,
    )
}


def _positive_int(v):
    return isinstance(v, (int, np.integer)) and not isinstance(v, bool) and v >= 1


def _positive_real(v):
    return isinstance(v, (int, float, np.number)) and not isinstance(v, bool) and np.isfinite(v) and v > 0


def _cap(v):
    return v is None or _positive_int(v)


_VALIDATORS = {
    "max_depth": (_positive_int, "a positive integer"),
    "min_node_size": (_positive_int, "a positive integer"),
    "criterion": (lambda v: v in ("gini", "gain_ratio"), "'gini' or 'gain_ratio'"),
    "trees": (_positive_int, "a positive integer"),
    "bootstrap": (lambda v: isinstance(v, bool), "a boolean"),
    "features_per_split": (lambda v: v in ("sqrt", "all") or _positive_int(v), "'sqrt', 'all' or a positive integer"),
    "laplace_alpha": (_positive_real, "a positive real"),
    "variance_floor": (_positive_real, "a positive real"),
    "lambda": (_positive_real, "a positive real"),
    "epochs": (_positive_int, "a positive integer"),
    "subsample_cap": (_cap, "a positive integer or null"),
    "sigma": (lambda v: v == "auto" or _positive_real(v), "'auto' or a positive real"),
    "pattern_cap": (_cap, "a positive integer or null"),
    "rounds": (_positive_int, "a positive integer"),
    "learning_rate": (_positive_real, "a positive real"),
    "tree_depth": (_positive_int, "a positive integer"),
    "k": (_positive_int, "a positive integer"),
    "reference_cap": (_cap, "a positive integer or null"),
}


@dataclass(frozen=True)
class AlgorithmSpec:
    algorithm: str
    hyperparameters: dict[str, Any] = field(default_factory=dict)
    seed: int = 42

    def __post_init__(self):
        if self.algorithm not in DEFAULTS:
            raise BadHyperparameter(f"unknown algorithm {self.algorithm!r}; choose from {', '.join(ALGORITHMS)}")
        defaults = DEFAULTS[self.algorithm]
        unknown = set(self.hyperparameters) - set(defaults)
        if unknown:
            raise BadHyperparameter(f"unknown hyperparameter(s) for {self.algorithm}: {sorted(unknown)}")
        merged = {**defaults, **self.hyperparameters}
        for key, value in merged.items():
            check, expected = _VALIDATORS[key]
            if not check(value):
                raise BadHyperparameter(f"{self.algorithm}.{key} must be {expected}, got {value!r}")
        object.__setattr__(self, "hyperparameters", merged)

    def to_dict(self) -> dict:
        return {"algorithm": self.algorithm, "hyperparameters": dict(self.hyperparameters), "seed": self.seed}

    @classmethod
    def from_dict(cls, payload: dict) -> "AlgorithmSpec":
        return cls(payload["algorithm"], dict(payload.get("hyperparameters", {})), int(payload.get("seed", 42)))


def default_spec(algorithm: str, seed: int = 42, *, no_cap: bool = False, **overrides) -> AlgorithmSpec:
    params = dict(overrides)
    if no_cap and algorithm in CAP_KEYS:
        params[CAP_KEYS[algorithm]] = None
    return AlgorithmSpec(algorithm, params, seed)


@dataclass(frozen=True, eq=False)
class TrainedModel:
    spec: AlgorithmSpec
    width: int
    fitted: Any

    @property
    def algorithm(self) -> str:
        return self.spec.algorithm

    def _check(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 1:
            x = x[None, :]
        if x.shape[1] != self.width:
            raise WidthMismatch(f"model expects {self.width} columns, got {x.shape[1]}")
        return x

    def scores(self, x: np.ndarray) -> np.ndarray:
        """Attack-class score in [0, 1] for every row."""
        return np.clip(self.fitted.scores(self._check(x)), 0.0, 1.0)

    def predict_batch(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        scores = self.scores(x)
        return (scores >= 0.5).astype(np.int8), scores


def train(spec: AlgorithmSpec, data: DesignMatrix) -> TrainedModel:
    if data.n_rows < 2:
        raise SingleClassData("training needs at least two rows")
    if len(np.unique(data.labels)) < 2:
        raise SingleClassData("training data contains a single class")
    fitted = _MODEL_CLASSES[spec.algorithm].fit(data, spec.hyperparameters, spec.seed)
    return TrainedModel(spec, data.width, fitted)


def predict(model: TrainedModel, row) -> tuple[int, float]:
    """Label and attack score for one feature row."""
    row = np.asarray(row, dtype=np.float64)
    if row.ndim != 1:
        raise WidthMismatch("predict takes a single row; use predict_batch for matrices")
    labels, scores = model.predict_batch(row)
    return int(labels[0]), float(scores[0])


def predict_batch(model: TrainedModel, x) -> tuple[np.ndarray, np.ndarray]:
    return model.predict_batch(x)


_FIXED_DATE = (1980, 1, 1, 0, 0, 0)


def model_to_bytes(model: TrainedModel) -> bytes:
    """Serialize to an ``.npz``-compatible zip; identical models give identical bytes."""
    meta, arrays = model.fitted.state()
    header = {
        "format_version": MODEL_FORMAT_VERSION,
        "spec": model.spec.to_dict(),
        "width": model.width,
        "meta": meta,
    }
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w", compression=zipfile.ZIP_DEFLATED) as zf:
        info = zipfile.ZipInfo("header.json", date_time=_FIXED_DATE)
        info.compress_type = zipfile.ZIP_DEFLATED
        zf.writestr(info, json.dumps(header, sort_keys=True))
        for name in sorted(arrays):
            member = io.BytesIO()
            np.lib.format.write_array(member, np.ascontiguousarray(arrays[name]), allow_pickle=False)
            info = zipfile.ZipInfo(f"{name}.npy", date_time=_FIXED_DATE)
            info.compress_type = zipfile.ZIP_DEFLATED
            zf.writestr(info, member.getvalue())
    return buf.getvalue()


def model_from_bytes(data: bytes) -> TrainedModel:
    try:
        zf = zipfile.ZipFile(io.BytesIO(data))
        header = json.loads(zf.read("header.json"))
    except (zipfile.BadZipFile, KeyError, ValueError) as exc:
        raise ModelFormatError(f"not a model file: {exc}") from None
    version = header.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ModelFormatError(f"model format version {version!r} is not supported (expected {MODEL_FORMAT_VERSION})")
    arrays = {}
    for name in zf.namelist():
        if name.endswith(".npy"):
            arrays[name[:-4]] = np.lib.format.read_array(io.BytesIO(zf.read(name)), allow_pickle=False)
    spec = AlgorithmSpec.from_dict(header["spec"])
    fitted = _MODEL_CLASSES[spec.algorithm].from_state(header["meta"], arrays)
    return TrainedModel(spec, int(header["width"]), fitted)


def save_model(model: TrainedModel, path: str | os.PathLike) -> None:
    with open(path, "wb") as fh:
        fh.write(model_to_bytes(model))


def load_model(path: str | os.PathLike) -> TrainedModel:
    with open(path, "rb") as fh:
        return model_from_bytes(fh.read())


__all__ = [
    "ALGORITHMS",
    "AlgorithmSpec",
    "CAP_KEYS",
    "DEFAULTS",
    "DISPLAY_NAMES",
    "SIGMA_GRID",
    "TrainedModel",
    "default_spec",
    "load_model",
    "model_from_bytes",
    "model_to_bytes",
    "predict",
    "predict_batch",
    "save_model",
    "train",
]
