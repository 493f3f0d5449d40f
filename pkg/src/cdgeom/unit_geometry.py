"""Line/point geometry carried by the imaginary units of a multiplication table.

Three imaginary units e_a, e_b, e_c with e_a e_b = +-e_c form a line. Those
lines make the 2**N - 1 units into PG(N-1, 2). A sorted line a < b < c is
*ordinary* when a + b == c and *defective* otherwise; counting both kinds
through every point splits the points into type classes alpha, beta, ...
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from math import comb
from typing import Iterable, NamedTuple

from .algebra import DEFAULT_MAX_LEVEL, MultTable, build_table
from .incidence import IncidenceStructure

GREEK = (
    "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta",
    "iota", "kappa", "lambda", "mu", "nu", "xi", "omicron", "pi",
)
GREEK_SYMBOLS = dict(zip(GREEK, "αβγδεζηθικλμνξοπ"))


class TableCorruptionError(ValueError):
    """A multiplication table breaks the XOR rule for unit products."""


class StratificationError(ValueError):
    pass


class ConfigurationError(ValueError):
    """No unambiguous point class to carve the configuration from."""


class LineClass(Enum):
    ORDINARY = "ordinary"
    DEFECTIVE = "defective"


class Line(NamedTuple):
    a: int
    b: int
    c: int

    @classmethod
    def of(cls, *points: int) -> "Line":
        a, b, c = sorted(points)
        if not 0 < a < b < c or a ^ b != c:
            raise ValueError(f"{(a, b, c)} is not a line of the unit geometry")
        return cls(a, b, c)


def extract_triples(table: MultTable) -> list[Line]:
    """Distinguished unit triples of a table, sorted lexicographically."""
    if table.level < 2:
        raise ValueError(f"unit triples need level >= 2, got {table.level}")
    bad = table.xor_violations()
    if bad:
        a, b = bad[0]
        raise TableCorruptionError(
            f"e_{a} e_{b} has index {int(table.units[a, b])}, expected {a ^ b} "
            f"({len(bad)} violations)"
        )
    units = table.units.tolist()
    size = table.size
    lines = []
    for a in range(1, size):
        row = units[a]
        for b in range(a + 1, size):
            c = row[b]
            if c > b:
                lines.append(Line(a, b, c))
    return lines


def classify_line(line: Line) -> LineClass:
    return LineClass.ORDINARY if line.a + line.b == line.c else LineClass.DEFECTIVE


@dataclass(frozen=True)
class Stratification:
    level: int
    profiles: dict[int, tuple[int, int]]
    classes: tuple[tuple[str, frozenset[int]], ...]

    def class_of(self, point: int) -> str:
        for label, members in self.classes:
            if point in members:
                return label
        raise KeyError(point)

    def __getitem__(self, label: str) -> frozenset[int]:
        for name, members in self.classes:
            if name == label:
                return members
        raise KeyError(label)

    def labels(self) -> list[str]:
        return [label for label, _ in self.classes]

    def class_profile(self, label: str) -> tuple[int, int]:
        return self.profiles[min(self[label])]

    def sizes(self) -> dict[str, int]:
        return {label: len(members) for label, members in self.classes}


def stratify_points(lines: Iterable[Line], level: int) -> Stratification:
    """Group points by their (ordinary, defective) line counts.

    Classes are labelled alpha, beta, ... by decreasing defective count.
    """
    lines = list(lines)
    points = range(1, 1 << level)
    ordinary = Counter()
    defective = Counter()
    for ln in lines:
        tally = ordinary if classify_line(ln) is LineClass.ORDINARY else defective
        tally.update(ln)
    per_point = (1 << (level - 1)) - 1
    profiles = {}
    for p in points:
        prof = (ordinary[p], defective[p])
        if sum(prof) != per_point:
            raise StratificationError(f"point {p} lies on {sum(prof)} lines, expected {per_point}")
        profiles[p] = prof

    groups: dict[tuple[int, int], set[int]] = {}
    for p, prof in profiles.items():
        groups.setdefault(prof, set()).add(p)
    order = sorted(groups, key=lambda prof: -prof[1])
    defects = [prof[1] for prof in order]
    if len(set(defects)) != len(defects):
        raise StratificationError(f"point classes share a defective count: {order}")
    if len(order) > len(GREEK):
        raise StratificationError(f"too many point classes to label: {len(order)}")
    classes = tuple((GREEK[i], frozenset(groups[prof])) for i, prof in enumerate(order))
    return Stratification(level, profiles, classes)


def build_pg_model(level: int) -> IncidenceStructure:
    """PG(N-1, 2) on points 1 .. 2**N - 1 with lines {a, b, a ^ b}."""
    if level < 2:
        raise ValueError(f"PG model needs level >= 2, got {level}")
    size = 1 << level
    lines = [(a, b, a ^ b) for a in range(1, size) for b in range(a + 1, size) if a ^ b > b]
    return IncidenceStructure(range(1, size), lines)


def line_type(strat: Stratification, line: Line) -> tuple[tuple[str, ...], LineClass]:
    """Sorted class labels of a line's points plus its ordinary/defective tag."""
    labels = tuple(sorted((strat.class_of(p) for p in line), key=GREEK.index))
    return labels, classify_line(line)


@dataclass(frozen=True)
class UnitGeometry:
    """Everything derived from one level's table, computed once."""

    level: int
    table: MultTable
    lines: tuple[Line, ...]
    stratification: Stratification

    def census(self) -> dict[LineClass, int]:
        counts = Counter(classify_line(ln) for ln in self.lines)
        return {cls: counts.get(cls, 0) for cls in LineClass}

    def line_type_census(self) -> dict[tuple[tuple[str, ...], LineClass], int]:
        counts = Counter(line_type(self.stratification, ln) for ln in self.lines)
        return dict(sorted(
            counts.items(),
            key=lambda kv: (kv[0][1].value, [GREEK.index(x) for x in kv[0][0]]),
        ))

    def lines_of(self, cls: LineClass) -> list[Line]:
        return [ln for ln in self.lines if classify_line(ln) is cls]


@lru_cache(maxsize=None)
def unit_geometry(level: int, max_level: int = DEFAULT_MAX_LEVEL) -> UnitGeometry:
    table = build_table(level, max_level=max_level)
    lines = tuple(extract_triples(table))
    return UnitGeometry(level, table, lines, stratify_points(lines, level))


def configuration_class(level: int) -> str | None:
    """Label of the point class that carries C_N, or None for N <= 3."""
    if level <= 3:
        return None
    geo = unit_geometry(level)
    target = comb(level + 1, 2)
    hits = [label for label, members in geo.stratification.classes if len(members) == target]
    if len(hits) != 1:
        raise ConfigurationError(
            f"level {level}: need exactly one point class of size {target}, "
            f"found {geo.stratification.sizes()}"
        )
    return hits[0]


@lru_cache(maxsize=None)
def extract_configuration(level: int) -> IncidenceStructure:
    """The binomial configuration C_N living inside the level-N unit geometry.

    N = 1 is a single point, N = 2 the single line, N = 3 the Fano plane with
    its largest beta point and the three lines through it removed. For
    N >= 4 it is the unique point class of size C(N+1, 2) together with all
    defective lines contained in it.
    """
    if level < 1:
        raise ValueError(f"configuration needs level >= 1, got {level}")
    if level == 1:
        return IncidenceStructure([1])
    geo = unit_geometry(level)
    if level == 2:
        return IncidenceStructure(range(1, 4), geo.lines)
    if level == 3:
        drop = max(geo.stratification["beta"])
        keep = [p for p in range(1, 8) if p != drop]
        return IncidenceStructure(keep, [ln for ln in geo.lines if drop not in ln])
    members = geo.stratification[configuration_class(level)]
    lines = [
        ln for ln in geo.lines_of(LineClass.DEFECTIVE) if members.issuperset(ln)
    ]
    return IncidenceStructure(members, lines)


def gamma_pattern_holds(level: int) -> bool:
    """Whether the zero-defect class is {1, 2, 4, ..., 2**(N-1), 2**N - 1}.

    Diagnostic only: observed for N = 5 and 6, not claimed beyond.
    """
    geo = unit_geometry(level)
    last_label, last = geo.stratification.classes[-1]
    if geo.stratification.class_profile(last_label)[1] != 0:
        return False
    expected = {1 << i for i in range(level)} | {(1 << level) - 1}
    return set(last) == expected
