from itertools import combinations
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdgeom.incidence import (
    ConfigParams,
    IncidenceError,
    IncidenceStructure,
    IsomorphismWitness,
    NotLinear,
    NotRegular,
    binomial_params,
    collinearity_distance,
    count_pasch,
    grassmannian,
    is_binomial,
    isomorphic,
    validate_configuration,
)
from cdgeom.unit_geometry import build_pg_model, extract_configuration


def brute_pasch(s):
    """Count 4-line subsets whose 6 pairwise meets are distinct single points."""
    lines = [frozenset(ln) for ln in s.lines]
    total = 0
    for quad in combinations(lines, 4):
        meets = [x & y for x, y in combinations(quad, 2)]
        if all(len(m) == 1 for m in meets) and len(frozenset().union(*meets)) == 6:
            total += 1
    return total


def floyd_warshall(s):
    n = s.num_points
    inf = n + 1
    d = np.full((n, n), inf, dtype=int)
    np.fill_diagonal(d, 0)
    for ln in s.lines:
        for p, q in combinations(ln, 2):
            d[s.index(p), s.index(q)] = d[s.index(q), s.index(p)] = 1
    for k in range(n):
        d = np.minimum(d, d[:, [k]] + d[[k], :])
    return d, inf


def ten_three_configurations():
    """Yield every (10_3) configuration on points 0..9 whose lines are
    chosen in lexicographic order (with repetitions up to isomorphism)."""
    triples = list(combinations(range(10), 3))
    degree = [0] * 10
    used_pairs: set = set()
    chosen: list = []

    def extend(start):
        if len(chosen) == 10:
            yield list(chosen)
            return
        # the smallest point still short of degree 3 must be covered next
        low = next(p for p in range(10) if degree[p] < 3)
        for t in triples[start:]:
            if t[0] != low:
                if t[0] > low:
                    return
                continue
            pairs = list(combinations(t, 2))
            if any(degree[p] == 3 for p in t) or any(pr in used_pairs for pr in pairs):
                continue
            for p in t:
                degree[p] += 1
            used_pairs.update(pairs)
            chosen.append(t)
            yield from extend(triples.index(t) + 1)
            chosen.pop()
            used_pairs.difference_update(pairs)
            for p in t:
                degree[p] -= 1

    yield from extend(0)


@pytest.fixture(scope="module")
def non_desargues():
    for lines in ten_three_configurations():
        s = IncidenceStructure(range(10), lines)
        if brute_pasch(s) != 5:
            return s
    pytest.fail("no (10_3) configuration with a different Pasch count found")


def test_structure_validation():
    with pytest.raises(IncidenceError):
        IncidenceStructure([1, 2, 3], [(1, 2)])
    with pytest.raises(IncidenceError):
        IncidenceStructure([1, 2, 3], [(1, 2, 4)])
    with pytest.raises(IncidenceError):
        IncidenceStructure([1, 2, 3], [(1, 2, 3), (3, 2, 1)])
    with pytest.raises(IncidenceError):
        IncidenceStructure([1, 2, 3], [(1, 1, 2)])


def test_structure_canonical_order():
    s = IncidenceStructure([5, 3, 1, 2, 4], [(5, 4, 1), (3, 2, 1)])
    assert s.points == (1, 2, 3, 4, 5)
    assert s.lines == ((1, 2, 3), (1, 4, 5))
    assert s == IncidenceStructure(range(1, 6), [(1, 2, 3), (1, 4, 5)])
    assert hash(s) == hash(IncidenceStructure(range(1, 6), [(1, 4, 5), (1, 2, 3)]))


def test_mixed_point_labels_sort():
    s = IncidenceStructure([(1, 2), (1, 3), (2, 3)], [[(1, 2), (2, 3), (1, 3)]])
    assert s.points[0] == (1, 2)
    assert s.degree((1, 3)) == 1


@pytest.mark.parametrize("name,params", [
    ("pasch", ConfigParams(6, 2, 4, 3)),
    ("desargues", ConfigParams(10, 3, 10, 3)),
    ("fano", ConfigParams(7, 3, 7, 3)),
])
def test_validate_configuration(name, params, request):
    assert validate_configuration(request.getfixturevalue(name)) == params


def test_config_params_text():
    assert str(ConfigParams(10, 3, 10, 3)) == "(10_3)"
    assert str(ConfigParams(6, 2, 4, 3)) == "(6_2, 4_3)"


def test_not_regular():
    s = IncidenceStructure(range(5), [(0, 1, 2), (0, 3, 4)])
    with pytest.raises(NotRegular):
        validate_configuration(s)
    with pytest.raises(IncidenceError):
        validate_configuration(IncidenceStructure([]))


def test_not_linear():
    s = IncidenceStructure(range(4), [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)])
    with pytest.raises(NotLinear):
        validate_configuration(s)


def test_is_binomial():
    assert is_binomial(extract_configuration(5), 5)
    assert is_binomial(extract_configuration(6), 6)
    assert not is_binomial(build_pg_model(3), 3)


def test_grassmannian_small():
    g3 = grassmannian(3)
    assert (g3.num_points, g3.num_lines) == (3, 1)
    g2 = grassmannian(2)
    assert (g2.num_points, g2.num_lines) == (1, 0)
    with pytest.raises(ValueError):
        grassmannian(1)
    assert validate_configuration(grassmannian(5)) == ConfigParams(10, 3, 10, 3)
    assert isomorphic(grassmannian(4), extract_configuration(3)) is not None


@pytest.mark.parametrize("m", range(3, 13))
def test_grassmannian_parameters(m):
    p = validate_configuration(grassmannian(m))
    assert (p.v, p.r, p.b, p.k) == (comb(m, 2), m - 2, comb(m, 3), 3)


@pytest.mark.parametrize("n", range(1, 12))
def test_grassmannian_is_binomial(n):
    assert is_binomial(grassmannian(n + 1), n)
    assert binomial_params(n).v * binomial_params(n).r == binomial_params(n).b * 3


@pytest.mark.parametrize("n", range(3, 9))
def test_grassmannian_pasch_count(n):
    assert count_pasch(grassmannian(n + 1)) == comb(n + 1, 4)


@pytest.mark.parametrize("level,expected", [(3, 1), (4, 5), (5, 15), (6, 35)])
def test_pasch_count_matches_brute_force(level, expected):
    s = extract_configuration(level)
    assert count_pasch(s) == expected
    if level <= 5:
        assert brute_pasch(s) == expected


def test_pasch_count_fano_and_pg3():
    fano = build_pg_model(3)
    assert count_pasch(fano) == brute_pasch(fano) == 7
    pg3 = build_pg_model(4)
    assert count_pasch(pg3) == brute_pasch(pg3)


def test_distance_examples(pasch):
    p = pasch.points[0]
    assert collinearity_distance(pasch, p, p) == 0
    ln = pasch.lines[0]
    assert collinearity_distance(pasch, ln[0], ln[2]) == 1
    far = [(p, q) for p, q in combinations(pasch.points, 2) if collinearity_distance(pasch, p, q) == 2]
    assert len(far) == 3
    assert all(not pasch.collinear(p, q) for p, q in far)


def test_distance_unreachable(two_lines):
    assert collinearity_distance(two_lines, 0, 4) is None
    with pytest.raises(KeyError):
        collinearity_distance(two_lines, 0, 99)


@pytest.mark.parametrize("s", [
    extract_configuration(3), extract_configuration(4), extract_configuration(5),
    grassmannian(7), IncidenceStructure(range(7), [(0, 1, 2), (2, 3, 4), (5, 0, 6)]),
    IncidenceStructure(range(8), [(0, 1, 2), (3, 4, 5)]),
], ids=["pasch", "desargues", "cayley-salmon", "g2-7", "path", "disconnected"])
def test_distance_matches_floyd_warshall(s):
    d, inf = floyd_warshall(s)
    for i, p in enumerate(s.points):
        for j, q in enumerate(s.points):
            got = collinearity_distance(s, p, q)
            assert got == (None if d[i, j] == inf else d[i, j])


def test_components(two_lines, desargues):
    parts = two_lines.components()
    assert [c.num_points for c in parts] == [3, 3]
    assert len(desargues.components()) == 1


def test_identity_witness(desargues):
    w = isomorphic(desargues, desargues)
    assert w is not None and w.verify(desargues, desargues)


def test_cayley_salmon_is_grassmannian():
    a, b = extract_configuration(5), grassmannian(6)
    w = isomorphic(a, b)
    assert w is not None and w.verify(a, b)
    assert w.inverse().verify(b, a)


@pytest.mark.parametrize("n", range(1, 7))
def test_configuration_isomorphic_to_grassmannian(n):
    a, b = extract_configuration(n), grassmannian(n + 1)
    w = isomorphic(a, b)
    assert w is not None and w.verify(a, b)


def test_second_ten_three_is_not_desargues(desargues, non_desargues):
    assert validate_configuration(non_desargues) == ConfigParams(10, 3, 10, 3)
    assert brute_pasch(non_desargues) != brute_pasch(desargues)
    assert isomorphic(desargues, non_desargues) is None
    assert isomorphic(non_desargues, desargues) is None


def test_size_mismatch_gives_none(pasch, desargues, fano):
    assert isomorphic(pasch, desargues) is None
    assert isomorphic(fano, pasch) is None
    assert isomorphic(IncidenceStructure([]), IncidenceStructure([])) is not None


def test_witness_verify_rejects_bad_maps(pasch):
    ident = {p: p for p in pasch.points}
    assert IsomorphismWitness(ident).verify(pasch, pasch)
    swaps = []
    for p, q in combinations(pasch.points, 2):
        m = dict(ident)
        m[p], m[q] = q, p
        swaps.append(IsomorphismWitness(m).verify(pasch, pasch))
    assert not all(swaps)
    collapsed = dict(ident)
    collapsed[pasch.points[0]] = pasch.points[1]
    assert not IsomorphismWitness(collapsed).verify(pasch, pasch)


def test_point_colours_constrain_witness(fano):
    cls = {p: ("a" if p in {3, 5, 6} else "b") for p in fano.points}
    other = {p: ("a" if p in {1, 2, 3} else "b") for p in fano.points}
    w = isomorphic(fano, fano, point_colors=(cls, other))
    assert w is not None and w.verify(fano, fano)
    assert {w.mapping[p] for p in (3, 5, 6)} == {1, 2, 3}
    bad = {p: ("a" if p in {1, 2, 4} else "b") for p in fano.points}
    assert isomorphic(fano, fano, point_colors=(cls, bad)) is None


def test_line_colours_constrain_witness(fano):
    mark = frozenset({3, 5, 6})
    colours_a = {frozenset(ln): frozenset(ln) == mark for ln in fano.lines}
    colours_b = {frozenset(ln): frozenset(ln) == frozenset({1, 2, 3}) for ln in fano.lines}
    w = isomorphic(fano, fano, line_colors=(colours_a, colours_b))
    assert w is not None and w.image_of_line(mark) == {1, 2, 3}


structures = st.sampled_from([
    extract_configuration(3), extract_configuration(4), extract_configuration(5),
    build_pg_model(3), build_pg_model(4), grassmannian(6),
])


@settings(max_examples=40, deadline=None)
@given(structures, st.randoms(use_true_random=False))
def test_isomorphism_survives_relabelling(s, rnd):
    targets = [f"x{i}" for i in range(s.num_points)]
    rnd.shuffle(targets)
    relabelled = s.relabel(dict(zip(s.points, targets)))
    w = isomorphic(s, relabelled)
    assert w is not None and w.verify(s, relabelled)
    back = isomorphic(relabelled, s)
    assert back is not None and back.verify(relabelled, s)
    assert w.inverse().verify(relabelled, s)
