"""Geometric hyperplanes and Veldkamp spaces of 3-point-line geometries.

A geometric hyperplane is a proper point subset that every line either
lies in or meets in exactly one point. The Veldkamp space has the
hyperplanes as points; two hyperplanes H1, H2 span the line
{H1, H2, complement of H1 ^ H2}.
"""

from __future__ import annotations

import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, product
from math import comb
from typing import Iterable

from .incidence import IncidenceStructure, IsomorphismWitness, isomorphic, point_key
from .unit_geometry import (
    GREEK,
    LineClass,
    build_pg_model,
    extract_configuration,
    line_type,
    unit_geometry,
)

DEFAULT_MAX_POINTS = 36
NAIVE_MAX_POINTS = 20
UNION = " ⊔ "


class ResourceBoundError(ValueError):
    pass


class ThirdPointNotHyperplane(ValueError):
    """The complement of a symmetric difference of two hyperplanes is not one."""


class UnknownComponentError(ValueError):
    """A hyperplane component matches none of C_1, C_2, ..."""


class FineStructureMismatch(AssertionError):
    pass


def max_workers() -> int:
    try:
        return max(1, int(os.environ.get("CDGEOM_MAX_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class Hyperplane:
    points: frozenset
    composition: str | None = field(default=None, compare=False)

    def sort_key(self):
        return (len(self.points), point_key(self.points))

    def __len__(self):
        return len(self.points)


# -- enumeration -------------------------------------------------------

# Each line tracks how many of its points are decided inside / outside; it is
# satisfied iff it finishes with exactly one or three points inside.


def _search(n: int, lines: list[tuple[int, int, int]], through: list[list[int]],
            prefix: tuple[int, ...]) -> list[int]:
    state = [0] * n  # 0 unassigned, 1 in, -1 out
    n_in = [0] * len(lines)
    n_out = [0] * len(lines)
    results = []
    trail: list[int] = []

    def set_point(p: int, value: int) -> bool:
        queue = [(p, value)]
        while queue:
            p, value = queue.pop()
            if state[p]:
                if state[p] != value:
                    return False
                continue
            state[p] = value
            trail.append(p)
            # update every count first so undo() stays exact on early exit
            counts = n_in if value == 1 else n_out
            for li in through[p]:
                counts[li] += 1
            for li in through[p]:
                i, o = n_in[li], n_out[li]
                free = 3 - i - o
                if (i == 2 and o == 1) or o == 3:
                    return False
                if free == 1:
                    # two decided: in+in -> in, in+out -> out, out+out -> in
                    forced = -1 if (i == 1 and o == 1) else 1
                    (q,) = (x for x in lines[li] if not state[x])
                    queue.append((q, forced))
        return True

    def undo(mark: int) -> None:
        while len(trail) > mark:
            p = trail.pop()
            value = state[p]
            state[p] = 0
            for li in through[p]:
                if value == 1:
                    n_in[li] -= 1
                else:
                    n_out[li] -= 1

    def recurse(start: int) -> None:
        p = start
        while p < n and state[p]:
            p += 1
        if p == n:
            mask = 0
            for i in range(n):
                if state[i] == 1:
                    mask |= 1 << i
            results.append(mask)
            return
        for value in (-1, 1):
            mark = len(trail)
            if set_point(p, value):
                recurse(p + 1)
            undo(mark)

    for p, bit in enumerate(prefix):
        if not set_point(p, 1 if bit else -1):
            return []
    recurse(0)
    return results


def _hyperplane_masks(s: IncidenceStructure, workers: int) -> list[int]:
    n = s.num_points
    lines = list(s._lines)
    through = s._through
    depth = min(n, 4) if workers > 1 else 0
    prefixes = list(product((0, 1), repeat=depth))
    if workers > 1 and len(prefixes) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(_search, [n] * len(prefixes), [lines] * len(prefixes),
                             [through] * len(prefixes), prefixes)
            masks = [m for part in parts for m in part]
    else:
        masks = _search(n, lines, through, ())
    full = (1 << n) - 1
    return sorted(m for m in set(masks) if m != full)


def is_hyperplane(s: IncidenceStructure, subset: Iterable) -> bool:
    sub = set(subset)
    if not sub.issubset(s.points) or len(sub) == s.num_points:
        return False
    return all(sum(p in sub for p in ln) in (1, 3) for ln in s.lines)


def enumerate_hyperplanes(
    s: IncidenceStructure,
    max_points: int = DEFAULT_MAX_POINTS,
    workers: int | None = None,
) -> list[Hyperplane]:
    """All geometric hyperplanes, ordered by size then points.

    Depth-first in/out assignment of points; every line with two decided
    points forces its third point, which prunes most of the 2**v space.
    """
    if s.num_points > max_points:
        raise ResourceBoundError(f"{s.num_points} points exceeds bound {max_points}")
    workers = max_workers() if workers is None else workers
    masks = _hyperplane_masks(s, workers)
    hyps = [
        Hyperplane(frozenset(s.points[i] for i in range(s.num_points) if m >> i & 1))
        for m in masks
    ]
    return sorted(hyps, key=Hyperplane.sort_key)


def naive_hyperplanes(s: IncidenceStructure, max_points: int = NAIVE_MAX_POINTS) -> list[Hyperplane]:
    """Reference enumeration: test every one of the 2**v subsets."""
    n = s.num_points
    if n > max_points:
        raise ResourceBoundError(f"naive scan of {n} points exceeds bound {max_points}")
    line_masks = [sum(1 << s.index(p) for p in ln) for ln in s.lines]
    full = (1 << n) - 1
    found = []
    for m in range(full):
        if all(bin(m & lm).count("1") in (1, 3) for lm in line_masks):
            found.append(Hyperplane(frozenset(s.points[i] for i in range(n) if m >> i & 1)))
    return sorted(found, key=Hyperplane.sort_key)


# -- composition labels ------------------------------------------------


@lru_cache(maxsize=None)
def _reference(k: int) -> IncidenceStructure:
    return extract_configuration(k)


def _component_size_to_k(v: int) -> int | None:
    k = 1
    while comb(k + 1, 2) < v:
        k += 1
    return k if comb(k + 1, 2) == v else None


def component_name(comp: IncidenceStructure) -> str | None:
    k = _component_size_to_k(comp.num_points)
    if k is None or comb(k + 1, 3) != comp.num_lines:
        return None
    if isomorphic(comp, _reference(k)) is None:
        return None
    return f"C_{k}"


def composition_label(s: IncidenceStructure, subset: Iterable, strict: bool = True) -> str:
    """Disjoint-union label of the sub-geometry induced on ``subset``.

    Components are matched against C_1, C_2, ... by isomorphism. With
    ``strict=False`` an unmatched component is described by its point and
    line counts instead of raising.
    """
    sub = s.induced(subset)
    if sub.num_points == 0:
        return "∅"
    names = []
    for comp in sub.components():
        name = component_name(comp)
        if name is None:
            if strict:
                raise UnknownComponentError(
                    f"component with {comp.num_points} points and {comp.num_lines} lines "
                    "is not isomorphic to any C_k"
                )
            name = f"[{comp.num_points}p,{comp.num_lines}l]"
        names.append(name)
    return UNION.join(names)


def classify_hyperplane(s: IncidenceStructure, h: Hyperplane | Iterable) -> str:
    points = h.points if isinstance(h, Hyperplane) else frozenset(h)
    if not is_hyperplane(s, points):
        raise ValueError("subset is not a geometric hyperplane")
    return composition_label(s, points)


def classified_hyperplanes(s: IncidenceStructure, **kwargs) -> list[Hyperplane]:
    return [
        Hyperplane(h.points, classify_hyperplane(s, h))
        for h in enumerate_hyperplanes(s, **kwargs)
    ]


def composition_census(hyperplanes: Iterable[Hyperplane]) -> dict[str, int]:
    counts = Counter(h.composition for h in hyperplanes)
    return dict(sorted(counts.items(), key=lambda kv: (-kv[1], kv[0] or "")))


# -- Veldkamp space ----------------------------------------------------


@dataclass(frozen=True)
class VeldkampLine:
    members: tuple[frozenset, frozenset, frozenset]
    core: frozenset


def third_hyperplane(points: frozenset, h1: frozenset, h2: frozenset) -> frozenset:
    return points - (h1 ^ h2)


def veldkamp_lines(s: IncidenceStructure, hyperplanes: Iterable[Hyperplane] | None = None,
                   check_cores: bool = True) -> list[VeldkampLine]:
    """Veldkamp lines by the third-point rule.

    Raises ThirdPointNotHyperplane when some pair's third point is missing.
    With ``check_cores`` the line is also recomputed from the intersection
    definition (all H with H1 & H2 == H1 & H == H2 & H) and compared.
    """
    if hyperplanes is None:
        hyperplanes = enumerate_hyperplanes(s)
    hyps = [h.points if isinstance(h, Hyperplane) else frozenset(h) for h in hyperplanes]
    known = set(hyps)
    everything = frozenset(s.points)
    seen = set()
    out = []
    for h1, h2 in combinations(hyps, 2):
        h3 = third_hyperplane(everything, h1, h2)
        if h3 not in known:
            raise ThirdPointNotHyperplane(
                f"complement of symmetric difference of {sorted(h1, key=point_key)} and "
                f"{sorted(h2, key=point_key)} is not a hyperplane"
            )
        members = frozenset((h1, h2, h3))
        if members in seen:
            continue
        seen.add(members)
        core = h1 & h2
        if not (h1 & h3 == core and h2 & h3 == core):
            raise AssertionError("Veldkamp line members do not share a common core")
        if check_cores:
            by_core = {h for h in hyps if h1 & h == core and h2 & h == core} | {h1, h2}
            if by_core != members:
                raise AssertionError("third-point rule disagrees with the intersection definition")
        ordered = tuple(sorted(members, key=lambda h: (len(h), point_key(h))))
        out.append(VeldkampLine(ordered, core))
    out.sort(key=lambda vl: [point_key(h) for h in vl.members])
    return out


def veldkamp_space(s: IncidenceStructure, hyperplanes: Iterable[Hyperplane] | None = None,
                   check_cores: bool = True) -> IncidenceStructure:
    """The Veldkamp space of ``s``; its points are hyperplanes as frozensets."""
    if hyperplanes is None:
        hyperplanes = enumerate_hyperplanes(s)
    hyps = [h.points if isinstance(h, Hyperplane) else frozenset(h) for h in hyperplanes]
    lines = veldkamp_lines(s, hyps, check_cores=check_cores)
    return IncidenceStructure(hyps, [vl.members for vl in lines])


# -- fine structure ----------------------------------------------------


@dataclass
class LineTypeMatch:
    hyperplane_types: tuple[str, ...]
    core: str
    point_classes: tuple[str, ...]
    line_class: LineClass
    veldkamp_count: int
    pg_count: int

    @property
    def ok(self) -> bool:
        return self.veldkamp_count == self.pg_count


@dataclass
class FineStructureReport:
    level: int
    hyperplane_census: dict[str, int]
    point_class_sizes: dict[str, int]
    class_of_composition: dict[str, str]
    veldkamp_line_count: int
    pg_line_count: int
    line_types: list[LineTypeMatch]
    witness: IsomorphismWitness | None
    problems: list[str]

    @property
    def ok(self) -> bool:
        return not self.problems and self.witness is not None


def verify_fine_structure(level: int, max_points: int = DEFAULT_MAX_POINTS,
                          raise_on_mismatch: bool = True) -> FineStructureReport:
    """Match V(C_N) against the level-N PG model, class by class.

    Hyperplane compositions are paired with point classes of equal size.
    Each Veldkamp line gets a type from its members' compositions and the
    shape of its core; each PG line a type from its points' classes and its
    ordinary/defective tag. Types are paired the same way, and finally a
    point- and line-colour preserving isomorphism is searched for.
    """
    geo = unit_geometry(level)
    strat = geo.stratification
    pg = build_pg_model(level)
    conf = extract_configuration(level)
    hyps = classified_hyperplanes(conf, max_points=max_points)
    vlines = veldkamp_lines(conf, hyps)
    vspace = IncidenceStructure([h.points for h in hyps], [vl.members for vl in vlines])
    problems: list[str] = []

    comp_of = {h.points: h.composition for h in hyps}
    hcensus = composition_census(hyps)
    sizes = strat.sizes()

    class_of_comp: dict[str, str] = {}
    for comp, count in hcensus.items():
        matches = [label for label, size in sizes.items() if size == count]
        if len(matches) != 1:
            problems.append(f"hyperplane class {comp} ({count}) matches point classes {matches}")
        else:
            class_of_comp[comp] = matches[0]
    if len(set(class_of_comp.values())) != len(class_of_comp) or len(class_of_comp) != len(sizes):
        problems.append(f"no bijection between compositions {hcensus} and point classes {sizes}")

    def vtype(vl: VeldkampLine) -> tuple[tuple[str, ...], str]:
        comps = tuple(sorted(comp_of[h] for h in vl.members))
        return comps, composition_label(conf, vl.core, strict=False)

    vcensus = Counter(vtype(vl) for vl in vlines)
    pcensus = geo.line_type_census()
    line_types: list[LineTypeMatch] = []
    pg_of_vtype: dict = {}
    if not problems:
        unused = dict(pcensus)
        for vt, count in sorted(vcensus.items()):
            classes = tuple(sorted((class_of_comp[c] for c in vt[0]), key=GREEK.index))
            cands = [pt for pt, pc in unused.items() if pt[0] == classes and pc == count]
            if len(cands) != 1:
                cands = [pt for pt in unused if pt[0] == classes]
            if len(cands) != 1:
                problems.append(f"Veldkamp line type {vt} ({count}) has PG candidates {cands}")
                continue
            pt = cands[0]
            del unused[pt]
            pg_of_vtype[vt] = pt
            line_types.append(LineTypeMatch(vt[0], vt[1], pt[0], pt[1], count, pcensus[pt]))
            if count != pcensus[pt]:
                problems.append(f"line type {pt}: Veldkamp {count} vs PG {pcensus[pt]}")
        for pt in unused:
            problems.append(f"PG line type {pt} ({pcensus[pt]}) has no Veldkamp counterpart")

    witness = None
    if not problems:
        pcolor_v = {h.points: class_of_comp[h.composition] for h in hyps}
        pcolor_pg = {p: strat.class_of(p) for p in pg.points}
        lcolor_v = {frozenset(vl.members): pg_of_vtype[vtype(vl)] for vl in vlines}
        lcolor_pg = {frozenset(ln): line_type(strat, ln) for ln in geo.lines}
        witness = isomorphic(vspace, pg, (pcolor_v, pcolor_pg), (lcolor_v, lcolor_pg))
        if witness is None:
            problems.append("no class-preserving isomorphism between V(C_N) and PG(N-1,2)")

    report = FineStructureReport(
        level=level,
        hyperplane_census=hcensus,
        point_class_sizes=sizes,
        class_of_composition=class_of_comp,
        veldkamp_line_count=len(vlines),
        pg_line_count=pg.num_lines,
        line_types=line_types,
        witness=witness,
        problems=problems,
    )
    if raise_on_mismatch and problems:
        raise FineStructureMismatch("; ".join(problems))
    return report


@dataclass(frozen=True)
class NestingReport:
    level: int
    count: int
    expected: int

    @property
    def holds(self) -> bool:
        return self.count > 0

    def __bool__(self) -> bool:
        return self.holds


def check_nesting(level: int, max_points: int = DEFAULT_MAX_POINTS) -> NestingReport:
    """Count hyperplanes of C_N whose composition is exactly C_{N-1}."""
    if level < 2:
        raise ValueError(f"nesting needs level >= 2, got {level}")
    conf = extract_configuration(level)
    target = f"C_{level - 1}"
    count = sum(
        1 for h in enumerate_hyperplanes(conf, max_points=max_points)
        if composition_label(conf, h.points, strict=False) == target
    )
    return NestingReport(level, count, level + 1)
