"""Reader and writer for the ARFF subset used by NSL-KDD.

Only ``numeric``/``real``/``integer`` and nominal ``{...}`` attributes are
accepted. Values are held per row as plain Python objects:

* numeric attribute -> ``float``
* nominal attribute -> ``int`` index into :attr:`ArffAttribute.values`
* missing (``?``)   -> ``None``
"""

from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator, Sequence

from .errors import (
    ArityMismatch,
    MalformedHeader,
    NonNumericToken,
    UndeclaredNominalValue,
)

NUMERIC = "numeric"
NOMINAL = "nominal"

_NUMERIC_KINDS = {"numeric", "real", "integer"}
# characters that force a name or value to be quoted on output
_SPECIAL = set(" \t,{}'\"%\\")

Value = float | int | None


@dataclass(frozen=True)
class ArffAttribute:
    name: str
    kind: str
    values: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in (NUMERIC, NOMINAL):
            raise ValueError(f"unknown attribute kind {self.kind!r}")
        if self.kind == NOMINAL:
            if not self.values:
                raise ValueError(f"nominal attribute {self.name!r} has no values")
            if len(set(self.values)) != len(self.values):
                raise ValueError(f"nominal attribute {self.name!r} has duplicate values")
        elif self.values:
            raise ValueError(f"numeric attribute {self.name!r} cannot carry values")

    @property
    def is_nominal(self) -> bool:
        return self.kind == NOMINAL

    def index_of(self, value: str) -> int:
        return self.values.index(value)


@dataclass(frozen=True)
class ArffDocument:
    relation_name: str
    attributes: tuple[ArffAttribute, ...]
    instances: tuple[tuple[Value, ...], ...] = field(default=())

    def __post_init__(self):
        names = [a.name for a in self.attributes]
        if len(set(names)) != len(names):
            raise ValueError("attribute names must be unique")

    def __len__(self) -> int:
        return len(self.instances)

    def attribute(self, name: str) -> ArffAttribute:
        for attr in self.attributes:
            if attr.name == name:
                return attr
        raise KeyError(name)

    def attribute_index(self, name: str) -> int:
        for i, attr in enumerate(self.attributes):
            if attr.name == name:
                return i
        raise KeyError(name)

    def column(self, index: int) -> list[Value]:
        return [row[index] for row in self.instances]

    def decoded(self, row: int) -> list[float | str | None]:
        """Row ``row`` with nominal indices replaced by their text values."""
        out: list[float | str | None] = []
        for attr, v in zip(self.attributes, self.instances[row]):
            if v is not None and attr.is_nominal:
                out.append(attr.values[v])
            else:
                out.append(v)
        return out


def _unescape(text: str) -> str:
    out = []
    it = iter(text)
    for ch in it:
        if ch == "\\":
            nxt = next(it, "")
            out.append({"n": "\n", "t": "\t", "r": "\r"}.get(nxt, nxt))
        else:
            out.append(ch)
    return "".join(out)


def _split_fields(text: str, line_no: int, *, closing: str | None = None) -> list[tuple[str, bool]]:
    """Split on commas outside quotes.

    Returns ``(token, was_quoted)`` pairs; unquoted tokens are stripped,
    quoted ones are returned verbatim (after unescaping).
    """
    tokens: list[tuple[str, bool]] = []
    i, n = 0, len(text)
    while True:
        while i < n and text[i] in " \t":
            i += 1
        if i < n and text[i] in "'\"":
            quote = text[i]
            j = i + 1
            buf_start = j
            while j < n and text[j] != quote:
                if text[j] == "\\":
                    j += 1
                j += 1
            if j >= n:
                raise MalformedHeader("unterminated quoted token", line_no)
            tokens.append((_unescape(text[buf_start:j]), True))
            i = j + 1
            while i < n and text[i] in " \t":
                i += 1
            if i < n and text[i] != ",":
                raise MalformedHeader(f"unexpected text after quoted token: {text[i:]!r}", line_no)
        else:
            j = text.find(",", i)
            if j < 0:
                j = n
            tokens.append((text[i:j].strip(), False))
            i = j
        if i >= n:
            break
        i += 1  # skip comma
    return tokens


def _read_name(text: str, line_no: int) -> tuple[str, str]:
    """Read one (possibly quoted) name; return it and the remaining text."""
    text = text.lstrip()
    if not text:
        raise MalformedHeader("missing name", line_no)
    if text[0] in "'\"":
        quote = text[0]
        j = 1
        while j < len(text) and text[j] != quote:
            if text[j] == "\\":
                j += 1
            j += 1
        if j >= len(text):
            raise MalformedHeader("unterminated quoted name", line_no)
        return _unescape(text[1:j]), text[j + 1:]
    parts = text.split(None, 1)
    return parts[0], (parts[1] if len(parts) > 1 else "")


def _parse_attribute(rest: str, line_no: int) -> ArffAttribute:
    name, type_text = _read_name(rest, line_no)
    type_text = type_text.strip()
    if type_text.startswith("{"):
        if not type_text.endswith("}"):
            raise MalformedHeader(f"unterminated nominal list for {name!r}", line_no)
        inner = type_text[1:-1]
        if not inner.strip():
            raise MalformedHeader(f"empty nominal list for {name!r}", line_no)
        values = tuple(tok for tok, _ in _split_fields(inner, line_no))
        if any(v == "" for v in values):
            raise MalformedHeader(f"empty nominal value for {name!r}", line_no)
        if len(set(values)) != len(values):
            raise MalformedHeader(f"duplicate nominal value for {name!r}", line_no)
        return ArffAttribute(name, NOMINAL, values)
    kind = type_text.lower()
    if kind in _NUMERIC_KINDS:
        return ArffAttribute(name, NUMERIC)
    raise MalformedHeader(f"unsupported attribute kind {type_text!r} for {name!r}", line_no)


def _parse_number(token: str, line_no: int, attr: ArffAttribute) -> float:
    try:
        value = float(token)
    except ValueError:
        raise NonNumericToken(
            f"{token!r} is not a number (attribute {attr.name!r})", line_no
        ) from None
    if not math.isfinite(value):
        raise NonNumericToken(f"non-finite number {token!r} (attribute {attr.name!r})", line_no)
    return value


def _iter_lines(source: str | IO[str] | Iterable[str]) -> Iterator[str]:
    if isinstance(source, str):
        yield from io.StringIO(source)
    else:
        yield from source


def parse_arff(source: str | IO[str] | Iterable[str]) -> ArffDocument:
    """Parse ARFF text (a string, an open text file or any line iterable)."""
    relation: str | None = None
    attributes: list[ArffAttribute] = []
    seen: set[str] = set()
    in_data = False
    rows: list[tuple[Value, ...]] = []
    lookups: list[dict[str, int] | None] = []

    for line_no, raw in enumerate(_iter_lines(source), start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue

        if not in_data:
            if not line.startswith("@"):
                raise MalformedHeader(f"expected a header keyword, got {line[:40]!r}", line_no)
            keyword, _, rest = line.partition(" ")
            if "\t" in keyword:
                keyword, _, extra = keyword.partition("\t")
                rest = extra + " " + rest
            keyword = keyword.lower()
            if keyword == "@relation":
                if relation is not None:
                    raise MalformedHeader("duplicate @relation", line_no)
                relation, _ = _read_name(rest, line_no)
            elif relation is None:
                raise MalformedHeader(f"{keyword} before @relation", line_no)
            elif keyword == "@attribute":
                attr = _parse_attribute(rest, line_no)
                if attr.name in seen:
                    raise MalformedHeader(f"duplicate attribute name {attr.name!r}", line_no)
                seen.add(attr.name)
                attributes.append(attr)
                lookups.append(
                    {v: i for i, v in enumerate(attr.values)} if attr.is_nominal else None
                )
            elif keyword == "@data":
                if not attributes:
                    raise MalformedHeader("@data before any @attribute", line_no)
                in_data = True
            else:
                raise MalformedHeader(f"unknown keyword {keyword!r}", line_no)
            continue

        if line.startswith("{"):
            raise ArityMismatch("sparse data rows are not supported", line_no)
        tokens = _split_fields(line, line_no)
        if len(tokens) != len(attributes):
            raise ArityMismatch(
                f"expected {len(attributes)} values, found {len(tokens)}", line_no
            )
        row: list[Value] = []
        for (token, quoted), attr, lookup in zip(tokens, attributes, lookups):
            if token == "?" and not quoted:
                row.append(None)
            elif lookup is None:
                row.append(_parse_number(token, line_no, attr))
            else:
                try:
                    row.append(lookup[token])
                except KeyError:
                    raise UndeclaredNominalValue(
                        f"{token!r} is not declared for attribute {attr.name!r}", line_no
                    ) from None
        rows.append(tuple(row))

    if relation is None:
        raise MalformedHeader("missing @relation", 0)
    if not in_data:
        raise MalformedHeader("missing @data section", 0)
    return ArffDocument(relation, tuple(attributes), tuple(rows))


def load_arff(path: str | os.PathLike) -> ArffDocument:
    with open(path, encoding="utf-8") as fh:
        return parse_arff(fh)


def _quote(text: str) -> str:
    if text and text != "?" and not (_SPECIAL & set(text)) and text.isprintable():
        return text
    escaped = (
        text.replace("\\", "\\\\")
        .replace("'", "\\'")
        .replace("\n", "\\n")
        .replace("\r", "\\r")
        .replace("\t", "\\t")
    )
    return f"'{escaped}'"


def _format_number(value: float) -> str:
    if value.is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


def write_arff(doc: ArffDocument) -> str:
    lines = [f"@relation {_quote(doc.relation_name)}", ""]
    for attr in doc.attributes:
        if attr.is_nominal:
            kind = "{" + ",".join(_quote(v) for v in attr.values) + "}"
        else:
            kind = "numeric"
        lines.append(f"@attribute {_quote(attr.name)} {kind}")
    lines.append("")
    lines.append("@data")
    for row in doc.instances:
        cells = []
        for attr, v in zip(doc.attributes, row):
            if v is None:
                cells.append("?")
            elif attr.is_nominal:
                cells.append(_quote(attr.values[v]))
            else:
                cells.append(_format_number(float(v)))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def save_arff(doc: ArffDocument, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(write_arff(doc))


def document_from_rows(
    relation: str,
    attributes: Sequence[ArffAttribute],
    rows: Iterable[Sequence[float | str | None]],
) -> ArffDocument:
    """Build a document from decoded rows (nominal cells given as text)."""
    lookups = [{v: i for i, v in enumerate(a.values)} if a.is_nominal else None for a in attributes]
    encoded = []
    for row in rows:
        if len(row) != len(attributes):
            raise ArityMismatch(f"expected {len(attributes)} values, found {len(row)}", 0)
        cells: list[Value] = []
        for v, lookup in zip(row, lookups):
            if v is None:
                cells.append(None)
            elif lookup is None:
                cells.append(float(v))
            else:
                cells.append(lookup[v])
        encoded.append(tuple(cells))
    return ArffDocument(relation, tuple(attributes), tuple(encoded))
