"""CSV / JSON / DOT encodings for tables, incidence structures and witnesses."""

from __future__ import annotations

import csv
import io
import json
import re
from typing import Any, Mapping

import numpy as np

from .algebra import MultTable, SignedUnit
from .incidence import IncidenceStructure, IsomorphismWitness, point_key


# -- multiplication tables ----------------------------------------------


def table_to_csv(table: MultTable) -> str:
    """Header of column indices, then one row per unit with "+k"/"-k" cells."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["*"] + list(range(table.size)))
    for a in range(table.size):
        writer.writerow([a] + [str(table[a, b]) for b in range(table.size)])
    return buf.getvalue()


def table_from_csv(text: str) -> MultTable:
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    header = [int(c) for c in rows[0][1:]]
    size = len(header)
    if header != list(range(size)) or size & (size - 1):
        raise ValueError("CSV header must list columns 0 .. 2**N - 1")
    if len(rows) - 1 != size:
        raise ValueError(f"expected {size} body rows, got {len(rows) - 1}")
    signs = np.empty((size, size), dtype=np.int8)
    units = np.empty((size, size), dtype=np.int64)
    for a, row in enumerate(rows[1:]):
        if int(row[0]) != a or len(row) != size + 1:
            raise ValueError(f"malformed row {a}")
        for b, token in enumerate(row[1:]):
            signs[a, b], units[a, b] = SignedUnit.parse(token)
    return MultTable(size.bit_length() - 1, signs, units)


def table_to_dict(table: MultTable) -> dict:
    entries = [[int(s), int(u)] for s, u in zip(table.signs.ravel(), table.units.ravel())]
    return {"level": table.level, "entries": entries}


def table_from_dict(doc: Mapping) -> MultTable:
    level = int(doc["level"])
    size = 1 << level
    entries = np.asarray(doc["entries"], dtype=np.int64)
    if entries.shape != (size * size, 2):
        raise ValueError(f"expected {size * size} [sign, index] entries")
    return MultTable(level, entries[:, 0].reshape(size, size), entries[:, 1].reshape(size, size))


def table_to_json(table: MultTable) -> str:
    return json.dumps(table_to_dict(table), separators=(",", ":"))


def table_from_json(text: str) -> MultTable:
    return table_from_dict(json.loads(text))


# -- incidence structures -----------------------------------------------


def _point_type(points) -> str:
    kinds = {type(p) for p in points}
    if not kinds or kinds <= {int}:
        return "int"
    if kinds <= {tuple}:
        return "tuple"
    if kinds <= {frozenset}:
        return "set"
    raise TypeError(f"cannot serialise point types {kinds}")


def encode_point(p) -> Any:
    if isinstance(p, frozenset):
        return [encode_point(x) for x in sorted(p, key=point_key)]
    if isinstance(p, tuple):
        return [encode_point(x) for x in p]
    return p


def _decode_atom(x):
    return tuple(x) if isinstance(x, list) else x


def decode_point(raw, point_type: str):
    if point_type == "int":
        return raw
    if point_type == "tuple":
        return tuple(raw)
    if point_type == "set":
        return frozenset(_decode_atom(x) for x in raw)
    raise ValueError(f"unknown point type {point_type!r}")


def structure_to_dict(s: IncidenceStructure, classes: Mapping[str, Any] | None = None) -> dict:
    doc: dict[str, Any] = {
        "points": [encode_point(p) for p in s.points],
        "lines": [[encode_point(p) for p in ln] for ln in s.lines],
    }
    if classes is not None:
        doc["classes"] = {
            label: [encode_point(p) for p in sorted(members, key=point_key)]
            for label, members in classes.items()
        }
    kind = _point_type(s.points)
    if kind != "int":
        doc["point_type"] = kind
    return doc


def structure_from_dict(doc: Mapping) -> IncidenceStructure:
    kind = doc.get("point_type", "int")
    points = [decode_point(p, kind) for p in doc["points"]]
    lines = [[decode_point(p, kind) for p in ln] for ln in doc["lines"]]
    return IncidenceStructure(points, lines)


def structure_to_json(s: IncidenceStructure, classes: Mapping[str, Any] | None = None) -> str:
    return json.dumps(structure_to_dict(s, classes), ensure_ascii=False)


def structure_from_json(text: str) -> IncidenceStructure:
    return structure_from_dict(json.loads(text))


def witness_to_list(w: IsomorphismWitness) -> list[list]:
    return [[encode_point(a), encode_point(b)] for a, b in w.pairs()]


def witness_from_list(pairs, type_a: str = "int", type_b: str = "int") -> IsomorphismWitness:
    return IsomorphismWitness({decode_point(a, type_a): decode_point(b, type_b) for a, b in pairs})


# -- DOT (Levi graph) ----------------------------------------------------


def _label(p) -> str:
    if isinstance(p, frozenset):
        return "{" + ",".join(_label(x) for x in sorted(p, key=point_key)) + "}"
    if isinstance(p, tuple):
        return "".join(str(x) for x in p) if all(isinstance(x, int) and x < 10 for x in p) else str(p)
    return str(p)


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def levi_dot(s: IncidenceStructure, line_class: Mapping[frozenset, str] | None = None,
             name: str = "levi") -> str:
    """Point-line bipartite graph. Each point node carries its JSON encoding
    in a ``point`` attribute so the structure can be read back."""
    kind = _point_type(s.points)
    out = [f"graph {name} {{", f"  graph [point_type={_quote(kind)}];"]
    for i, p in enumerate(s.points):
        payload = json.dumps(encode_point(p), separators=(",", ":"))
        out.append(f"  p{i} [shape=circle, label={_quote(_label(p))}, point={_quote(payload)}];")
    for li, ln in enumerate(s.lines):
        tag = line_class.get(frozenset(ln)) if line_class else None
        label = " ".join(_label(p) for p in ln)
        out.append(f"  L{li} [shape=box, label={_quote(label)}];")
        for p in ln:
            attr = f" [class={_quote(tag)}]" if tag is not None else ""
            out.append(f"  p{s.index(p)} -- L{li}{attr};")
    out.append("}")
    return "\n".join(out) + "\n"


_NODE = re.compile(r'^\s*(p\d+) \[.*point="((?:[^"\\]|\\.)*)"\];$')
_EDGE = re.compile(r"^\s*(p\d+) -- (L\d+)")
_KIND = re.compile(r'point_type="(\w+)"')


def structure_from_levi_dot(text: str) -> IncidenceStructure:
    kind_match = _KIND.search(text)
    kind = kind_match.group(1) if kind_match else "int"
    nodes = {}
    members: dict[str, list] = {}
    for line in text.splitlines():
        m = _NODE.match(line)
        if m:
            raw = m.group(2).replace('\\"', '"').replace("\\\\", "\\")
            nodes[m.group(1)] = decode_point(json.loads(raw), kind)
            continue
        m = _EDGE.match(line)
        if m:
            members.setdefault(m.group(2), []).append(m.group(1))
    lines = [[nodes[p] for p in ps] for ps in members.values()]
    return IncidenceStructure(nodes.values(), lines)
