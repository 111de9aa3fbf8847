import io

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from idsbench.arff import (
    NOMINAL,
    NUMERIC,
    ArffAttribute,
    ArffDocument,
    document_from_rows,
    load_arff,
    parse_arff,
    write_arff,
)
from idsbench.errors import ArityMismatch, MalformedHeader, NonNumericToken, UndeclaredNominalValue

SMALL = """% NSL-KDD style header
@relation 'KDDTrain'

@attribute 'duration' real
@attribute 'protocol_type' {'tcp','udp', 'icmp'}
@attribute 'src_bytes' integer
@attribute 'class' {'normal', 'anomaly'}

@data
0,tcp,491,normal
2,udp,?,anomaly
% trailing comment
0,icmp,1.5e3,anomaly
"""


def test_parses_header_and_rows():
    doc = parse_arff(SMALL)
    assert doc.relation_name == "KDDTrain"
    assert [a.name for a in doc.attributes] == ["duration", "protocol_type", "src_bytes", "class"]
    assert doc.attributes[1] == ArffAttribute("protocol_type", NOMINAL, ("tcp", "udp", "icmp"))
    assert doc.attributes[2].kind == NUMERIC
    assert doc.instances == ((0.0, 0, 491.0, 0), (2.0, 1, None, 1), (0.0, 2, 1500.0, 1))
    assert all(isinstance(v, float) for v in doc.column(0))


def test_class_attribute_declaration():
    doc = parse_arff("@relation r\n@attribute 'class' {normal, anomaly}\n@data\n")
    assert doc.attributes[0] == ArffAttribute("class", NOMINAL, ("normal", "anomaly"))


def test_two_attributes_no_rows():
    doc = parse_arff("@RELATION r\n@ATTRIBUTE a NUMERIC\n@Attribute b {x,y}\n@DATA\n")
    assert len(doc.attributes) == 2
    assert doc.instances == ()


def test_double_quoted_names_and_values():
    doc = parse_arff('@relation "my rel"\n@attribute "a b" {"x y", z}\n@data\n"x y"\nz\n')
    assert doc.relation_name == "my rel"
    assert doc.attributes[0].name == "a b"
    assert doc.instances == ((0,), (1,))


def test_quoted_question_mark_is_a_value():
    doc = parse_arff("@relation r\n@attribute a {'?', b}\n@data\n'?'\n?\n")
    assert doc.instances == ((0,), (None,))


@pytest.mark.parametrize(
    "text, error, line",
    [
        ("@attribute a numeric\n@relation r\n@data\n", MalformedHeader, 1),
        ("@relation r\n@attribute a string\n@data\n", MalformedHeader, 2),
        ("@relation r\n@attribute a date\n@data\n", MalformedHeader, 2),
        ("@relation r\n@attribute a {x,x}\n@data\n", MalformedHeader, 2),
        ("@relation r\n@attribute a numeric\n@attribute a numeric\n@data\n", MalformedHeader, 3),
        ("@relation r\n@attribute a {x,y}\n@data\nx\nq\n", UndeclaredNominalValue, 5),
        ("@relation r\n@attribute a numeric\n@attribute b numeric\n@data\n1,2\n1\n", ArityMismatch, 6),
        ("@relation r\n@attribute a numeric\n@data\nabc\n", NonNumericToken, 4),
        ("@relation r\n@attribute a numeric\n@data\nnan\n", NonNumericToken, 4),
        ("@relation r\n@attribute a numeric\n@data\ninf\n", NonNumericToken, 4),
        ("@relation r\n@attribute a numeric\n@data\n{0 1}\n", ArityMismatch, 4),
    ],
)
def test_errors_carry_line_numbers(text, error, line):
    with pytest.raises(error) as info:
        parse_arff(text)
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


def test_missing_data_section():
    with pytest.raises(MalformedHeader):
        parse_arff("@relation r\n@attribute a numeric\n")


def test_nominal_matching_is_case_sensitive_and_trimmed():
    doc = parse_arff("@relation r\n@attribute a {tcp, UDP}\n@data\n  tcp  \nUDP\n")
    assert doc.instances == ((0,), (1,))
    with pytest.raises(UndeclaredNominalValue):
        parse_arff("@relation r\n@attribute a {tcp}\n@data\nTCP\n")


def test_write_empty_document():
    doc = ArffDocument("r", (ArffAttribute("a", NUMERIC), ArffAttribute("b", NOMINAL, ("x", "y"))))
    text = write_arff(doc)
    assert text.rstrip().endswith("@data")
    assert parse_arff(text) == doc


def test_write_missing_marker():
    doc = document_from_rows("r", [ArffAttribute("a", NUMERIC), ArffAttribute("b", NOMINAL, ("x",))], [[None, "x"]])
    text = write_arff(doc)
    assert text.splitlines()[-1] == "?,x"
    assert parse_arff(text) == doc


def test_round_trip_fixture():
    doc = parse_arff(SMALL)
    assert parse_arff(write_arff(doc)) == doc


def test_parses_file_stream(tmp_path):
    path = tmp_path / "small.arff"
    path.write_text(SMALL, encoding="utf-8")
    assert load_arff(path) == parse_arff(io.StringIO(SMALL))


# -- generated documents ------------------------------------------------------

_text = st.text(
    alphabet=st.characters(blacklist_categories=("Cs", "Cc")) | st.sampled_from(" ,'\"{}%?\\\t"),
    min_size=1,
    max_size=12,
)


@st.composite
def documents(draw):
    names = draw(st.lists(_text, min_size=1, max_size=6, unique=True))
    attrs = []
    for name in names:
        if draw(st.booleans()):
            attrs.append(ArffAttribute(name, NUMERIC))
        else:
            attrs.append(ArffAttribute(name, NOMINAL, tuple(draw(st.lists(_text, min_size=1, max_size=5, unique=True)))))
    cell = {
        NUMERIC: st.one_of(st.none(), st.floats(allow_nan=False, allow_infinity=False)),
    }
    rows = []
    for _ in range(draw(st.integers(0, 8))):
        row = []
        for a in attrs:
            if a.is_nominal:
                row.append(draw(st.one_of(st.none(), st.integers(0, len(a.values) - 1))))
            else:
                v = draw(cell[NUMERIC])
                row.append(None if v is None else float(v))
        rows.append(tuple(row))
    return ArffDocument(draw(_text), tuple(attrs), tuple(rows))


@pytest.mark.criterion("5.arff_roundtrip")
@settings(max_examples=500, deadline=None)
@given(documents())
def test_round_trip_generated(doc):
    assert parse_arff(write_arff(doc)) == doc


@settings(max_examples=100, deadline=None)
@given(documents())
def test_row_order_preserved(doc):
    again = parse_arff(write_arff(doc))
    for i, row in enumerate(doc.instances):
        assert again.instances[i] == row
