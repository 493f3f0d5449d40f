"""Finite point-line incidence structures with three points per line."""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Hashable, Iterable, Mapping


class IncidenceError(ValueError):
    pass


class NotRegular(IncidenceError):
    """Points (or lines) do not all have the same degree."""


class NotLinear(IncidenceError):
    """Two distinct lines share two or more points."""


def point_key(p):
    """Sort key for opaque point labels (ints, tuples, frozensets of those)."""
    if isinstance(p, (frozenset, set)):
        return (1, tuple(sorted(point_key(x) for x in p)))
    if isinstance(p, tuple):
        return (1, tuple(point_key(x) for x in p))
    return (0, p)


class IncidenceStructure:
    """Points plus 3-point lines.

    Points are arbitrary hashable labels. ``points`` and ``lines`` are kept
    in a canonical sorted order so that every derived output is
    deterministic. Internally points are also addressed by their position
    in ``points``.
    """

    def __init__(self, points: Iterable[Hashable], lines: Iterable[Iterable[Hashable]] = ()):
        pts = tuple(sorted(set(points), key=point_key))
        index = {p: i for i, p in enumerate(pts)}
        seen = set()
        idx_lines = []
        for line in lines:
            members = frozenset(line)
            if len(members) != 3:
                raise IncidenceError(f"line {sorted(members, key=point_key)} does not have 3 distinct points")
            missing = [p for p in members if p not in index]
            if missing:
                raise IncidenceError(f"line contains unknown points {missing}")
            if members in seen:
                raise IncidenceError(f"duplicate line {sorted(members, key=point_key)}")
            seen.add(members)
            idx_lines.append(tuple(sorted(index[p] for p in members)))
        idx_lines.sort()

        self.points = pts
        self.lines = tuple(tuple(pts[i] for i in ln) for ln in idx_lines)
        self._index = index
        self._lines = idx_lines
        self._line_set = frozenset(frozenset(ln) for ln in idx_lines)
        through = [[] for _ in pts]
        for li, ln in enumerate(idx_lines):
            for i in ln:
                through[i].append(li)
        self._through = through
        self._adj = None
        self._hash = None

    # -- basic queries -------------------------------------------------

    @property
    def num_points(self) -> int:
        return len(self.points)

    @property
    def num_lines(self) -> int:
        return len(self.lines)

    def index(self, p) -> int:
        try:
            return self._index[p]
        except KeyError:
            raise KeyError(f"unknown point {p!r}") from None

    def __contains__(self, p) -> bool:
        return p in self._index

    def degree(self, p) -> int:
        return len(self._through[self.index(p)])

    def lines_through(self, p) -> list[tuple]:
        return [self.lines[li] for li in self._through[self.index(p)]]

    def has_line(self, members: Iterable) -> bool:
        try:
            return frozenset(self.index(p) for p in members) in self._line_set
        except KeyError:
            return False

    def adjacency(self) -> list[frozenset[int]]:
        """Collinearity graph as index adjacency sets."""
        if self._adj is None:
            adj = [set() for _ in self.points]
            for a, b, c in self._lines:
                adj[a].update((b, c))
                adj[b].update((a, c))
                adj[c].update((a, b))
            self._adj = [frozenset(s) for s in adj]
        return self._adj

    def collinear(self, p, q) -> bool:
        return self.index(q) in self.adjacency()[self.index(p)]

    def line_set(self) -> frozenset[frozenset]:
        return frozenset(frozenset(ln) for ln in self.lines)

    # -- derived structures --------------------------------------------

    def induced(self, subset: Iterable) -> "IncidenceStructure":
        """Sub-geometry on ``subset`` keeping the lines fully inside it."""
        sub = set(subset)
        unknown = sub - set(self._index)
        if unknown:
            raise KeyError(f"unknown points {sorted(unknown, key=point_key)}")
        return IncidenceStructure(sub, [ln for ln in self.lines if sub.issuperset(ln)])

    def relabel(self, mapping: Mapping) -> "IncidenceStructure":
        return IncidenceStructure(
            (mapping[p] for p in self.points),
            ([mapping[p] for p in ln] for ln in self.lines),
        )

    def components(self) -> list["IncidenceStructure"]:
        """Connected components of the collinearity graph, largest first."""
        adj = self.adjacency()
        seen = [False] * len(self.points)
        comps = []
        for start in range(len(self.points)):
            if seen[start]:
                continue
            seen[start] = True
            stack, members = [start], []
            while stack:
                i = stack.pop()
                members.append(i)
                for j in adj[i]:
                    if not seen[j]:
                        seen[j] = True
                        stack.append(j)
            comps.append(self.induced(self.points[i] for i in members))
        comps.sort(key=lambda c: (-c.num_points, -c.num_lines, [point_key(p) for p in c.points]))
        return comps

    def distances_from(self, p) -> dict:
        """Breadth-first collinearity distances to every reachable point."""
        adj = self.adjacency()
        src = self.index(p)
        dist = {src: 0}
        queue = deque([src])
        while queue:
            i = queue.popleft()
            for j in adj[i]:
                if j not in dist:
                    dist[j] = dist[i] + 1
                    queue.append(j)
        return {self.points[i]: d for i, d in dist.items()}

    # -- equality ------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, IncidenceStructure):
            return NotImplemented
        return set(self.points) == set(other.points) and self.line_set() == other.line_set()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((frozenset(self.points), self.line_set()))
        return self._hash

    def __repr__(self):
        return f"IncidenceStructure(points={self.num_points}, lines={self.num_lines})"


@dataclass(frozen=True)
class ConfigParams:
    v: int
    r: int
    b: int
    k: int = 3

    def __str__(self):
        if self.v == self.b and self.r == self.k:
            return f"({self.v}_{self.r})"
        return f"({self.v}_{self.r}, {self.b}_{self.k})"


def validate_configuration(s: IncidenceStructure) -> ConfigParams:
    if s.num_points == 0:
        raise IncidenceError("empty structure")
    degrees = Counter(len(t) for t in s._through)
    if len(degrees) != 1:
        raise NotRegular(f"point degrees vary: {dict(sorted(degrees.items()))}")
    pair_seen = set()
    for ln in s._lines:
        for pair in combinations(ln, 2):
            if pair in pair_seen:
                a, b = pair
                raise NotLinear(f"points {s.points[a]!r} and {s.points[b]!r} lie on two lines")
            pair_seen.add(pair)
    (r,) = degrees
    return ConfigParams(v=s.num_points, r=r, b=s.num_lines, k=3)


def binomial_params(n: int) -> ConfigParams:
    """Parameters of the binomial configuration with r = n - 1, k = 3."""
    return ConfigParams(v=comb(n + 1, 2), r=n - 1, b=comb(n + 1, 3), k=3)


def is_binomial(s: IncidenceStructure, n: int) -> bool:
    return validate_configuration(s) == binomial_params(n)


def grassmannian(m: int) -> IncidenceStructure:
    """Combinatorial Grassmannian G_2(m): 2-subsets of {1..m} as points.

    Each 3-subset {a, b, c} gives the line {ab, ac, bc}. Points are sorted
    pairs ``(a, b)``. m = 2 gives the single isolated point (1, 2).
    """
    if m < 2:
        raise ValueError(f"G_2(m) needs m >= 2, got {m}")
    ground = range(1, m + 1)
    points = list(combinations(ground, 2))
    lines = [list(combinations(t, 2)) for t in combinations(ground, 3)]
    return IncidenceStructure(points, lines)


def pasch_subconfigurations(s: IncidenceStructure) -> list[tuple[int, int, int, int]]:
    """All 4-sets of lines forming a Pasch configuration, as line indices.

    Four lines form a Pasch configuration iff every pair meets in exactly
    one point and the six meeting points are distinct.
    """
    lines = [frozenset(ln) for ln in s._lines]
    meets: list[dict[int, int]] = [dict() for _ in lines]
    for i, j in combinations(range(len(lines)), 2):
        common = lines[i] & lines[j]
        if len(common) == 1:
            (p,) = common
            meets[i][j] = p
            meets[j][i] = p
    found = []
    for i in range(len(lines)):
        later_i = [j for j in meets[i] if j > i]
        for j in later_i:
            pij = meets[i][j]
            for k in later_i:
                if k <= j or k not in meets[j]:
                    continue
                pik, pjk = meets[i][k], meets[j][k]
                if len({pij, pik, pjk}) != 3:
                    continue
                for m in later_i:
                    if m <= k or m not in meets[j] or m not in meets[k]:
                        continue
                    pts = {pij, pik, pjk, meets[i][m], meets[j][m], meets[k][m]}
                    if len(pts) == 6:
                        found.append((i, j, k, m))
    return found


def count_pasch(s: IncidenceStructure) -> int:
    return len(pasch_subconfigurations(s))


def collinearity_distance(s: IncidenceStructure, p, q) -> int | None:
    """Collinearity-graph distance, or None when q is unreachable from p."""
    s.index(q)
    return s.distances_from(p).get(q)


# -- isomorphism -------------------------------------------------------


@dataclass(frozen=True)
class IsomorphismWitness:
    mapping: Mapping

    def inverse(self) -> "IsomorphismWitness":
        return IsomorphismWitness({v: k for k, v in self.mapping.items()})

    def image_of_line(self, line: Iterable) -> frozenset:
        return frozenset(self.mapping[p] for p in line)

    def verify(self, a: IncidenceStructure, b: IncidenceStructure) -> bool:
        """Check that the mapping is a point bijection carrying lines onto lines."""
        m = self.mapping
        if set(m) != set(a.points) or set(m.values()) != set(b.points):
            return False
        if len(set(m.values())) != len(m) or a.num_lines != b.num_lines:
            return False
        images = {self.image_of_line(ln) for ln in a.lines}
        return images == b.line_set()

    def pairs(self) -> list[tuple]:
        return sorted(self.mapping.items(), key=lambda kv: point_key(kv[0]))


# Pasch membership counts are only used as an invariant on small structures;
# on large projective spaces they cost more than the search they would save.
_PASCH_INVARIANT_MAX_LINES = 120


def _initial_colors(s: IncidenceStructure, colors, use_pasch: bool) -> list:
    n = s.num_points
    adj = s.adjacency()
    sigs = []
    pasch = [0] * n
    if use_pasch:
        for quad in pasch_subconfigurations(s):
            pts = set()
            for li in quad:
                pts.update(s._lines[li])
            for i in pts:
                pasch[i] += 1
    for i in range(n):
        dist = {i: 0}
        queue = deque([i])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y not in dist:
                    dist[y] = dist[x] + 1
                    queue.append(y)
        profile = tuple(sorted(Counter(dist.values()).items()))
        extra = colors[s.points[i]] if colors is not None else None
        sigs.append((extra, len(s._through[i]), profile, n - len(dist), pasch[i]))
    return sigs


def _refine(structs, sig_lists, line_colors) -> list[list[int]]:
    """Jointly refine point colours of several structures to a fixed point."""
    palette: dict = {}
    cols = []
    for sigs in sig_lists:
        cols.append(sigs)
    n_classes = -1
    while True:
        allsigs = sorted({sig for c in cols for sig in c}, key=repr)
        palette = {sig: k for k, sig in enumerate(allsigs)}
        cols = [[palette[sig] for sig in c] for c in cols]
        count = len(palette)
        if count == n_classes:
            return cols
        n_classes = count
        new = []
        for s, c, lc in zip(structs, cols, line_colors):
            sigs = []
            for i in range(s.num_points):
                around = []
                for li in s._through[i]:
                    ln = s._lines[li]
                    others = tuple(sorted(c[j] for j in ln if j != i))
                    tag = lc[li] if lc is not None else None
                    around.append((others, repr(tag)))
                sigs.append((c[i], tuple(sorted(around))))
            new.append(sigs)
        cols = new


def _third_points(s: IncidenceStructure) -> dict[tuple[int, int], int | None]:
    third: dict[tuple[int, int], int | None] = {}
    for ln in s._lines:
        for x, y in combinations(ln, 2):
            (z,) = set(ln) - {x, y}
            for key in ((x, y), (y, x)):
                third[key] = None if key in third else z
    return third


def isomorphic(
    a: IncidenceStructure,
    b: IncidenceStructure,
    point_colors: tuple[Mapping, Mapping] | None = None,
    line_colors: tuple[Mapping, Mapping] | None = None,
) -> IsomorphismWitness | None:
    """Find a line-preserving point bijection from ``a`` onto ``b``.

    Optional ``point_colors`` / ``line_colors`` are pairs of mappings (for
    ``a`` and ``b``; lines keyed by frozenset of points) that the bijection
    must also preserve. Point invariants are refined jointly on both sides
    and the remaining choices are resolved by backtracking with forced
    third-point propagation. Returns ``None`` when no bijection exists.
    """
    if a.num_points != b.num_points or a.num_lines != b.num_lines:
        return None
    n = a.num_points
    if n == 0:
        return IsomorphismWitness({})

    pc_a, pc_b = point_colors if point_colors is not None else (None, None)
    if line_colors is not None:
        lc_a = [line_colors[0][frozenset(ln)] for ln in a.lines]
        lc_b = [line_colors[1][frozenset(ln)] for ln in b.lines]
        if Counter(map(repr, lc_a)) != Counter(map(repr, lc_b)):
            return None
    else:
        lc_a = lc_b = None

    use_pasch = a.num_lines <= _PASCH_INVARIANT_MAX_LINES
    col_a, col_b = _refine(
        (a, b),
        (_initial_colors(a, pc_a, use_pasch), _initial_colors(b, pc_b, use_pasch)),
        (lc_a, lc_b),
    )
    if Counter(col_a) != Counter(col_b):
        return None

    adj_a, adj_b = a.adjacency(), b.adjacency()
    third_a, third_b = _third_points(a), _third_points(b)
    lines_b = {frozenset(ln): li for li, ln in enumerate(b._lines)}
    by_color_b: dict[int, list[int]] = {}
    for j, c in enumerate(col_b):
        by_color_b.setdefault(c, []).append(j)

    fwd: dict[int, int] = {}
    bwd: dict[int, int] = {}

    def assign(p: int, q: int, trail: list[int]) -> bool:
        queue = [(p, q)]
        while queue:
            p, q = queue.pop()
            if p in fwd:
                if fwd[p] != q:
                    return False
                continue
            if q in bwd or col_a[p] != col_b[q]:
                return False
            na = sum(1 for x in adj_a[p] if x in fwd)
            nb = sum(1 for y in adj_b[q] if y in bwd)
            if na != nb:
                return False
            for x in adj_a[p]:
                if x in fwd and fwd[x] not in adj_b[q]:
                    return False
            fwd[p] = q
            bwd[q] = p
            trail.append(p)
            for li in a._through[p]:
                x, y = (t for t in a._lines[li] if t != p)
                fx, fy = fwd.get(x), fwd.get(y)
                if fx is not None and fy is not None:
                    lj = lines_b.get(frozenset((q, fx, fy)))
                    if lj is None:
                        return False
                    if lc_a is not None and repr(lc_a[li]) != repr(lc_b[lj]):
                        return False
                elif fx is not None or fy is not None:
                    known, other = (x, y) if fx is not None else (y, x)
                    if third_a.get((p, known)) is None:
                        continue
                    z = third_b.get((q, fwd[known]))
                    if z is None:
                        return False
                    queue.append((other, z))
        return True

    def undo(trail: list[int]) -> None:
        for p in trail:
            del bwd[fwd.pop(p)]

    def choose() -> int:
        best, best_key = -1, None
        for p in range(n):
            if p in fwd:
                continue
            free = sum(1 for q in by_color_b[col_a[p]] if q not in bwd)
            linked = sum(1 for x in adj_a[p] if x in fwd)
            key = (free, -linked, p)
            if best_key is None or key < best_key:
                best, best_key = p, key
        return best

    def search() -> bool:
        if len(fwd) == n:
            return True
        p = choose()
        for q in by_color_b[col_a[p]]:
            if q in bwd:
                continue
            trail: list[int] = []
            if assign(p, q, trail) and search():
                return True
            undo(trail)
        return False

    if not search():
        return None
    witness = IsomorphismWitness({a.points[i]: b.points[j] for i, j in fwd.items()})
    if not witness.verify(a, b):
        raise AssertionError("isomorphism search produced an invalid witness")
    if line_colors is not None:
        for ln in a.lines:
            img = witness.image_of_line(ln)
            if repr(line_colors[0][frozenset(ln)]) != repr(line_colors[1][img]):
                raise AssertionError("isomorphism search broke a line colour")
    return witness
