import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdgeom.algebra import build_table
from cdgeom.incidence import IncidenceStructure, grassmannian, isomorphic
from cdgeom.serialize import (
    decode_point,
    encode_point,
    levi_dot,
    structure_from_dict,
    structure_from_json,
    structure_from_levi_dot,
    structure_to_dict,
    structure_to_json,
    table_from_csv,
    table_from_dict,
    table_from_json,
    table_to_csv,
    table_to_json,
    witness_from_list,
    witness_to_list,
)
from cdgeom.unit_geometry import build_pg_model, classify_line, extract_configuration, unit_geometry
from cdgeom.veldkamp import veldkamp_space

from conftest import load_printed_table


def test_csv_layout_octonions():
    text = table_to_csv(build_table(3))
    rows = [r.split(",") for r in text.splitlines()]
    assert rows[0] == ["*"] + [str(b) for b in range(8)]
    assert rows[1] == ["0"] + [f"+{b}" for b in range(8)]
    assert rows[2] == ["1", "+1", "-0", "-3", "+2", "-5", "+4", "+7", "-6"]
    printed = load_printed_table(3)
    for a in range(1, 8):
        for b in range(1, 8):
            assert rows[a + 1][b + 1] == str(printed[a, b])


def test_csv_level_zero():
    assert table_to_csv(build_table(0)) == "*,0\n0,+0\n"


@pytest.mark.parametrize("level", range(0, 7))
def test_table_round_trips(level):
    t = build_table(level)
    assert table_from_csv(table_to_csv(t)) == t
    assert table_from_json(table_to_json(t)) == t


def test_json_table_shape():
    doc = json.loads(table_to_json(build_table(5)))
    assert doc["level"] == 5
    assert len(doc["entries"]) == 1024
    assert doc["entries"][16 * 32 + 2] == [1, 18]


@pytest.mark.parametrize("text", [
    "*,0,2\n0,+0,+2\n1,+1,-0\n",
    "*,0,1\n0,+0,+1\n",
    "*,0,1\n0,+0,+1\n1,+1\n",
])
def test_csv_rejects_malformed(text):
    with pytest.raises(ValueError):
        table_from_csv(text)


def test_json_rejects_wrong_entry_count():
    with pytest.raises(ValueError):
        table_from_dict({"level": 2, "entries": [[1, 0]] * 15})


@pytest.mark.parametrize("s", [
    extract_configuration(4), extract_configuration(5), grassmannian(6),
    build_pg_model(4), IncidenceStructure([7]),
], ids=["desargues", "cayley-salmon", "g2-6", "pg32", "single-point"])
def test_structure_json_round_trip(s):
    assert structure_from_json(structure_to_json(s)) == s
    assert structure_from_levi_dot(levi_dot(s)) == s


def test_structure_with_set_points_round_trips():
    v = veldkamp_space(extract_configuration(3))
    doc = structure_to_dict(v)
    assert doc["point_type"] == "set"
    assert structure_from_dict(json.loads(json.dumps(doc))) == v
    assert structure_from_levi_dot(levi_dot(v)) == v


def test_structure_classes_exported():
    conf = extract_configuration(4)
    strat = unit_geometry(4).stratification
    doc = structure_to_dict(conf, {"alpha": strat["alpha"]})
    assert doc["classes"]["alpha"] == sorted(strat["alpha"])
    assert "point_type" not in doc


def test_point_encoding():
    p = frozenset({(1, 2), (3, 4)})
    assert encode_point(p) == [[1, 2], [3, 4]]
    assert decode_point(encode_point(p), "set") == p
    assert decode_point([1, 2], "tuple") == (1, 2)
    with pytest.raises(ValueError):
        decode_point(1, "complex")


def test_mixed_point_types_rejected():
    with pytest.raises(TypeError):
        structure_to_dict(IncidenceStructure([1, (1, 2), 3], [(1, (1, 2), 3)]))


def test_witness_round_trip():
    a, b = extract_configuration(5), grassmannian(6)
    w = isomorphic(a, b)
    pairs = json.loads(json.dumps(witness_to_list(w)))
    back = witness_from_list(pairs, "int", "tuple")
    assert back.verify(a, b)
    assert back.mapping == w.mapping


def test_levi_dot_line_classes():
    geo = unit_geometry(3)
    tags = {frozenset(ln): classify_line(ln).value for ln in geo.lines}
    dot = levi_dot(build_pg_model(3), tags)
    assert dot.count(' -- ') == 21
    assert dot.count('class="defective"') == 3
    assert dot.count('class="ordinary"') == 18
    assert dot.startswith("graph levi {")


@st.composite
def int_structures(draw):
    n = draw(st.integers(3, 12))
    points = draw(st.lists(st.integers(-50, 50), min_size=n, max_size=n, unique=True))
    triples = draw(st.lists(
        st.lists(st.sampled_from(points), min_size=3, max_size=3, unique=True),
        max_size=8,
    ))
    lines = list({frozenset(t) for t in triples})
    return IncidenceStructure(points, lines)


@settings(max_examples=80, deadline=None)
@given(int_structures())
def test_random_structures_round_trip(s):
    assert structure_from_json(structure_to_json(s)) == s
    assert structure_from_levi_dot(levi_dot(s)) == s
