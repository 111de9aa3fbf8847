"""Command-line entry point: ``idsbench {inspect,bench,train,predict}``.

Exit codes:
    0  success
    1  pipeline error (preprocessing, training, model file)
    2  usage or configuration error
    3  ARFF parse error
    4  ``bench --check`` ran but a reference comparison failed
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import logging
import os
import sys
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import __version__
from .arff import load_arff
from .classifiers import ALGORITHMS, CAP_KEYS, AlgorithmSpec, load_model, save_model, train
from .errors import ArffError, BadHyperparameter, IdsBenchError
from .evaluation import CROSS, SPLIT, ConfusionCounts, accuracy, run_protocol_cross, run_protocol_split
from .preprocess import FeatureSchema, apply_schema, fit_schema
from .report import compare_to_reference, load_reference, render_report

EXIT_OK = 0
EXIT_PIPELINE = 1
EXIT_CONFIG = 2
EXIT_PARSE = 3
EXIT_CHECK_FAILED = 4

DATA_DIR_ENV = "IDSBENCH_DATA_DIR"
TRAIN_FILE = "KDDTrain+.arff"
TEST_FILE = "KDDTest+.arff"
FORMATS = ("markdown", "csv", "json")
_EXTENSIONS = {"markdown": "md", "csv": "csv", "json": "json"}

log = logging.getLogger("idsbench")


class ConfigError(IdsBenchError):
    pass


@dataclass
class RunConfig:
    train_arff: Path | None = None
    test_arff: Path | None = None
    output_dir: Path = Path("results")
    protocol: str = "both"
    algorithms: tuple[str, ...] = ALGORITHMS
    seed: int = 42
    train_fraction: float = 0.7
    stratified: bool = True
    no_cap: bool = False
    formats: tuple[str, ...] = FORMATS
    check: bool = False
    threads: int = field(default_factory=lambda: os.cpu_count() or 1)
    overrides: dict[str, dict] = field(default_factory=dict)

    def specs(self) -> list[AlgorithmSpec]:
        specs = []
        for algo in self.algorithms:
            params = dict(self.overrides.get(algo, {}))
            if self.no_cap and algo in CAP_KEYS:
                params[CAP_KEYS[algo]] = None
            specs.append(AlgorithmSpec(algo, params, self.seed))
        return specs

    def validate(self) -> None:
        if self.protocol not in (SPLIT, CROSS, "both"):
            raise ConfigError(f"protocol must be split, cross or both, got {self.protocol!r}")
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError(f"train_fraction must lie in (0, 1), got {self.train_fraction}")
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad:
            raise ConfigError(f"unknown algorithm(s): {', '.join(bad)}")
        bad = [f for f in self.formats if f not in FORMATS]
        if bad:
            raise ConfigError(f"unknown format(s): {', '.join(bad)}")
        if self.threads < 1:
            raise ConfigError("threads must be at least 1")
        needed = [("train_arff", self.train_arff)]
        if self.protocol in (CROSS, "both"):
            needed.append(("test_arff", self.test_arff))
        for name, path in needed:
            if path is None:
                raise ConfigError(f"{name} is not set (flag, config file or ${DATA_DIR_ENV})")
            if not Path(path).is_file() or not os.access(path, os.R_OK):
                raise ConfigError(f"{name} {path} does not exist or is not readable")
        for algo in self.overrides:
            if algo not in ALGORITHMS:
                raise ConfigError(f"override section for unknown algorithm {algo!r}")
        try:
            self.specs()
        except BadHyperparameter as exc:
            raise ConfigError(str(exc)) from None


def _parse_scalar(text: str):
    """Config/CLI value: JSON literal when it parses (numbers, true/false/null), else the raw string."""
    text = text.strip()
    try:
        return json.loads(text)
    except ValueError:
        return text


def _split_list(text: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in text.split(",") if part.strip())


def _parse_bool(text: str) -> bool:
    value = text.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


_BENCH_KEYS = {
    "train_arff": lambda v: Path(v),
    "test_arff": lambda v: Path(v),
    "output_dir": lambda v: Path(v),
    "protocol": str,
    "algorithms": _split_list,
    "seed": int,
    "train_fraction": float,
    "stratified": _parse_bool,
    "no_cap": _parse_bool,
    "formats": _split_list,
    "check": _parse_bool,
    "threads": int,
}


def read_config_file(path: str | os.PathLike) -> dict:
    """Read an INI file: a ``[bench]`` section plus one section per algorithm for hyperparameters."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    values: dict = {}
    overrides: dict[str, dict] = {}
    for section in parser.sections():
        if section == "bench":
            for key, raw in parser.items(section):
                if key not in _BENCH_KEYS:
                    raise ConfigError(f"unknown key {key!r} in [bench]")
                try:
                    values[key] = _BENCH_KEYS[key](raw)
                except ValueError as exc:
                    raise ConfigError(f"bad value for {key!r}: {exc}") from None
        elif section in ALGORITHMS:
            overrides[section] = {k: _parse_scalar(v) for k, v in parser.items(section)}
        else:
            raise ConfigError(f"unknown section [{section}] in {path}")
    if overrides:
        values["overrides"] = overrides
    return values


def _parse_set(items: Sequence[str]) -> dict[str, dict]:
    out: dict[str, dict] = {}
    for item in items:
        key, sep, raw = item.partition("=")
        algo, dot, param = key.partition(".")
        if not sep or not dot:
            raise ConfigError(f"--set expects ALGORITHM.PARAM=VALUE, got {item!r}")
        out.setdefault(algo.strip(), {})[param.strip()] = _parse_scalar(raw)
    return out


def build_run_config(args: argparse.Namespace, env: dict | None = None) -> RunConfig:
    """Layer built-in defaults < config file < command-line flags."""
    env = os.environ if env is None else env
    cfg = RunConfig()
    data_dir = env.get(DATA_DIR_ENV)
    if data_dir:
        cfg.train_arff = Path(data_dir) / TRAIN_FILE
        cfg.test_arff = Path(data_dir) / TEST_FILE
    if args.config:
        file_values = read_config_file(args.config)
        overrides = file_values.pop("overrides", {})
        for key, value in file_values.items():
            setattr(cfg, key, value)
        cfg.overrides = overrides
    flag_values = {
        "train_arff": Path(args.train) if args.train else None,
        "test_arff": Path(args.test) if args.test else None,
        "output_dir": Path(args.output_dir) if args.output_dir else None,
        "protocol": args.protocol,
        "algorithms": _split_list(args.algorithms) if args.algorithms else None,
        "seed": args.seed,
        "train_fraction": args.train_fraction,
        "formats": _split_list(args.format) if args.format else None,
        "threads": args.threads,
    }
    for key, value in flag_values.items():
        if value is not None:
            setattr(cfg, key, value)
    if args.no_cap:
        cfg.no_cap = True
    if args.check:
        cfg.check = True
    if args.linear_sampling:
        cfg.stratified = False
    for algo, params in _parse_set(args.set or []).items():
        cfg.overrides.setdefault(algo, {}).update(params)
    cfg.validate()
    return cfg


def cmd_inspect(args: argparse.Namespace) -> int:
    doc = load_arff(args.path)
    print(f"relation:   {doc.relation_name}")
    print(f"attributes: {len(doc.attributes)}")
    print(f"rows:       {len(doc.instances)}")
    label = args.label
    try:
        idx = doc.attribute_index(label)
    except KeyError:
        idx = None
    if idx is not None and doc.attributes[idx].is_nominal:
        attr = doc.attributes[idx]
        counts = Counter(doc.column(idx))
        print(f"label distribution ({label}):")
        for code, value in enumerate(attr.values):
            print(f"  {value}: {counts.get(code, 0)}")
        if counts.get(None):
            print(f"  ?: {counts[None]}")
    nominal = [a for a in doc.attributes if a.is_nominal and a.name != label]
    print(f"numeric attributes: {sum(not a.is_nominal for a in doc.attributes)}")
    print("nominal attributes: " + ", ".join(f"{a.name}({len(a.values)})" for a in nominal))
    return EXIT_OK


def _write_outputs(cfg: RunConfig, protocol: str, results) -> None:
    stem = "table1" if protocol == SPLIT else "table2"
    for fmt in cfg.formats:
        path = cfg.output_dir / f"{stem}.{_EXTENSIONS[fmt]}"
        path.write_text(render_report(results, fmt), encoding="utf-8")
        log.info("wrote %s", path)


def cmd_bench(args: argparse.Namespace) -> int:
    cfg = build_run_config(args)
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    specs = cfg.specs()
    train_doc = load_arff(cfg.train_arff)
    runs = {}
    if cfg.protocol in (SPLIT, "both"):
        runs[SPLIT] = run_protocol_split(
            train_doc, specs, cfg.train_fraction, cfg.seed, stratified=cfg.stratified, threads=cfg.threads
        )
    if cfg.protocol in (CROSS, "both"):
        test_doc = load_arff(cfg.test_arff)
        runs[CROSS] = run_protocol_cross(train_doc, test_doc, specs, threads=cfg.threads)

    verdict_ok = True
    for protocol, results in runs.items():
        _write_outputs(cfg, protocol, results)
        print(render_report(results, "markdown"))
        if cfg.check:
            reference = load_reference(protocol)
            ran = {r.algorithm for r in results}
            reference = type(reference)(
                reference.protocol,
                reference.title,
                reference.accuracy_decimals,
                tuple(row for row in reference.rows if row.algorithm in ran),
            )
            verdict = compare_to_reference(results, reference)
            (cfg.output_dir / f"verdict_{protocol}.json").write_text(
                json.dumps(verdict.to_dict(), indent=2), encoding="utf-8"
            )
            print(verdict.summary())
            verdict_ok &= verdict.passed
    if cfg.check and SPLIT in runs and CROSS in runs:
        split_acc = {r.algorithm: r.accuracy for r in runs[SPLIT]}
        degraded = all(r.accuracy < split_acc[r.algorithm] for r in runs[CROSS])
        print(f"degradation (cross < split for every algorithm): {'PASS' if degraded else 'FAIL'}")
        verdict_ok &= degraded
    return EXIT_OK if verdict_ok else EXIT_CHECK_FAILED


def cmd_train(args: argparse.Namespace) -> int:
    doc = load_arff(args.train)
    schema = fit_schema(doc, args.label, args.positive)
    matrix = apply_schema(schema, doc)
    params = _parse_set(args.set or []).get(args.algorithm, {})
    unexpected = set(_parse_set(args.set or [])) - {args.algorithm}
    if unexpected:
        raise ConfigError(f"--set targets {sorted(unexpected)} but the model is {args.algorithm}")
    if args.no_cap and args.algorithm in CAP_KEYS:
        params[CAP_KEYS[args.algorithm]] = None
    spec = AlgorithmSpec(args.algorithm, params, args.seed)
    model = train(spec, matrix)
    save_model(model, args.model)
    Path(args.schema).write_text(schema.to_json(), encoding="utf-8")
    labels, _ = model.predict_batch(matrix.values)
    acc = accuracy(ConfusionCounts.from_predictions(labels, matrix.labels))
    print(f"trained {args.algorithm} on {matrix.n_rows} rows x {matrix.width} columns; training accuracy {acc:.4f}")
    return EXIT_OK


def cmd_predict(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    schema = FeatureSchema.from_json(Path(args.schema).read_text(encoding="utf-8"))
    doc = load_arff(args.input)
    matrix = apply_schema(schema, doc, require_labels=False)
    labels, scores = model.predict_batch(matrix.values)
    out = open(args.output, "w", newline="", encoding="utf-8") if args.output else sys.stdout
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["row", "label", "score"])
        for i, (label, score) in enumerate(zip(labels, scores)):
            writer.writerow([i, int(label), repr(float(score))])
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="idsbench", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"idsbench {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("inspect", help="summarize an ARFF file")
    p.add_argument("path")
    p.add_argument("--label", default="class")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("bench", help="run the split and/or cross protocol and write reports")
    p.add_argument("--config", help="INI file with a [bench] section and per-algorithm sections")
    p.add_argument("--train", help=f"training ARFF (default ${DATA_DIR_ENV}/{TRAIN_FILE})")
    p.add_argument("--test", help=f"test ARFF for the cross protocol (default ${DATA_DIR_ENV}/{TEST_FILE})")
    p.add_argument("--output-dir")
    p.add_argument("--protocol", choices=[SPLIT, CROSS, "both"])
    p.add_argument("--algorithms", help="comma-separated subset of: " + ",".join(ALGORITHMS))
    p.add_argument("--seed", type=int)
    p.add_argument("--train-fraction", type=float)
    p.add_argument("--linear-sampling", action="store_true", help="unstratified 70/30 partition")
    p.add_argument("--set", action="append", metavar="ALGO.PARAM=VALUE", help="hyperparameter override")
    p.add_argument("--no-cap", action="store_true", help="disable SVM/PNN/kNN training subsample caps")
    p.add_argument("--format", help="comma-separated: markdown,csv,json")
    p.add_argument("--check", action="store_true", help="compare accuracies with the reference tables")
    p.add_argument("--threads", type=int, help="algorithms trained concurrently (default: CPU count)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("train", help="train one model and save it with its feature schema")
    p.add_argument("--train", required=True)
    p.add_argument("--algorithm", required=True, choices=ALGORITHMS)
    p.add_argument("--model", required=True, help="output model file")
    p.add_argument("--schema", required=True, help="output schema JSON")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--set", action="append", metavar="ALGO.PARAM=VALUE")
    p.add_argument("--no-cap", action="store_true")
    p.add_argument("--label", default="class")
    p.add_argument("--positive", default="anomaly")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="score an ARFF file with a saved model and schema")
    p.add_argument("--model", required=True)
    p.add_argument("--schema", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_predict)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(message)s",
    )
    try:
        return args.func(args)
    except ArffError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IdsBenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PIPELINE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PIPELINE


if __name__ == "__main__":
    sys.exit(main())
