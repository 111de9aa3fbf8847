"""Render results in the two-rows-per-algorithm table layout and compare to reference values."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from importlib import resources
from typing import Sequence

from .classifiers import DISPLAY_NAMES
from .errors import MissingAlgorithm
from .evaluation import CROSS, SPLIT, ConfusionCounts, ProtocolResult, per_class_rows, results_to_json

COLUMNS = (
    "Machine Learning Algorithm",
    "Class",
    "True Positives",
    "False Positives",
    "True Negatives",
    "False Negatives",
    "Accuracy",
)

ACCURACY_DECIMALS = {SPLIT: 3, CROSS: 2}


def round_half_up(value: Fraction | float, decimals: int) -> Decimal:
    if isinstance(value, Fraction):
        exact = Decimal(value.numerator) / Decimal(value.denominator)
    else:
        exact = Decimal(value)
    return exact.quantize(Decimal(1).scaleb(-decimals), rounding=ROUND_HALF_UP)


def table_rows(results: Sequence[ProtocolResult]) -> list[list[str]]:
    rows = []
    for r in results:
        attack, normal = per_class_rows(r.counts)
        acc = str(round_half_up(r.accuracy, ACCURACY_DECIMALS.get(r.protocol, 3)))
        name = DISPLAY_NAMES.get(r.algorithm, r.algorithm)
        rows.append([name, "Attack", *map(str, attack), acc])
        rows.append(["", "Normal", *map(str, normal), ""])
    return rows


def render_report(results: Sequence[ProtocolResult], fmt: str = "markdown") -> str:
    if not results:
        raise ValueError("cannot render a report without results")
    if fmt == "json":
        return results_to_json(results)
    rows = table_rows(results)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(COLUMNS)
        writer.writerows(rows)
        return buf.getvalue()
    if fmt == "markdown":
        lines = ["| " + " | ".join(COLUMNS) + " |", "|" + "|".join("---" for _ in COLUMNS) + "|"]
        lines += ["| " + " | ".join(row) + " |" for row in rows]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown report format {fmt!r}; use markdown, csv or json")


@dataclass(frozen=True)
class ReferenceRow:
    algorithm: str
    counts: ConfusionCounts
    accuracy: float
    accuracy_abs_tol: float


@dataclass(frozen=True)
class ReferenceTable:
    protocol: str
    title: str
    accuracy_decimals: int
    rows: tuple[ReferenceRow, ...]

    def row(self, algorithm: str) -> ReferenceRow:
        for r in self.rows:
            if r.algorithm == algorithm:
                return r
        raise KeyError(algorithm)

    def with_tolerance(self, tol: float) -> "ReferenceTable":
        rows = tuple(ReferenceRow(r.algorithm, r.counts, r.accuracy, tol) for r in self.rows)
        return ReferenceTable(self.protocol, self.title, self.accuracy_decimals, rows)


def load_reference(protocol: str) -> ReferenceTable:
    text = resources.files("idsbench").joinpath("data/reference_tables.json").read_text(encoding="utf-8")
    table = json.loads(text)["tables"][protocol]
    rows = tuple(
        ReferenceRow(
            r["algorithm"],
            ConfusionCounts(r["tp"], r["fp"], r["tn"], r["fn"]),
            float(r["accuracy"]),
            float(r["accuracy_abs_tol"]),
        )
        for r in table["rows"]
    )
    return ReferenceTable(protocol, table["title"], int(table["accuracy_decimals"]), rows)


@dataclass(frozen=True)
class AlgorithmVerdict:
    algorithm: str
    measured: float
    expected: float
    delta: float
    tolerance: float
    passed: bool


@dataclass(frozen=True)
class ComparisonVerdict:
    protocol: str
    entries: tuple[AlgorithmVerdict, ...]

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def to_dict(self) -> dict:
        return {
            "protocol": self.protocol,
            "passed": self.passed,
            "algorithms": [e.__dict__ for e in self.entries],
        }

    def summary(self) -> str:
        lines = [f"{self.protocol}: {'PASS' if self.passed else 'FAIL'}"]
        for e in self.entries:
            lines.append(
                f"  {e.algorithm:<14} measured {e.measured:.4f} expected {e.expected:.3f} "
                f"|delta| {e.delta:.4f} tol {e.tolerance:.2f} {'pass' if e.passed else 'FAIL'}"
            )
        return "\n".join(lines)


def compare_to_reference(results: Sequence[ProtocolResult], reference: ReferenceTable) -> ComparisonVerdict:
    measured = {r.algorithm: r.accuracy for r in results}
    missing = [row.algorithm for row in reference.rows if row.algorithm not in measured]
    if missing:
        raise MissingAlgorithm(f"results lack reference algorithm(s): {', '.join(missing)}")
    entries = []
    for row in reference.rows:
        delta = abs(measured[row.algorithm] - row.accuracy)
        entries.append(
            AlgorithmVerdict(row.algorithm, measured[row.algorithm], row.accuracy, delta, row.accuracy_abs_tol,
                             delta <= row.accuracy_abs_tol)
        )
    return ComparisonVerdict(reference.protocol, tuple(entries))
