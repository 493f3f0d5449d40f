import csv
import time
from contextlib import contextmanager
from pathlib import Path

import pytest

from cdgeom.algebra import SignedUnit
from cdgeom.incidence import IncidenceStructure
from cdgeom.unit_geometry import build_pg_model, extract_configuration

FIXTURES = Path(__file__).parent / "fixtures"

_ACCEPTANCE: list[str] = []


def load_printed_table(level: int) -> dict[tuple[int, int], SignedUnit]:
    """Imaginary block of a printed table, keyed by (row, column)."""
    with open(FIXTURES / f"printed_table_n{level}.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    cols = [int(c) for c in rows[0][1:]]
    cells = {}
    for row in rows[1:]:
        a = int(row[0])
        for b, token in zip(cols, row[1:]):
            cells[a, b] = SignedUnit.parse(token)
    return cells


@contextmanager
def criterion(number: int, title: str, budget: float):
    """Time a block, record a PASS/FAIL line and enforce the runtime budget."""
    start = time.perf_counter()
    try:
        yield
        elapsed = time.perf_counter() - start
        assert elapsed < budget, f"took {elapsed:.2f}s, budget {budget:.0f}s"
    except BaseException as exc:
        elapsed = time.perf_counter() - start
        _ACCEPTANCE.append(f"FAIL  criterion {number:>2}: {title} ({elapsed:.3f}s) :: {exc}")
        raise
    _ACCEPTANCE.append(f"PASS  criterion {number:>2}: {title} ({elapsed:.3f}s, budget {budget:.0f}s)")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def pasch():
    return extract_configuration(3)


@pytest.fixture(scope="session")
def desargues():
    return extract_configuration(4)


@pytest.fixture(scope="session")
def fano():
    return build_pg_model(3)


@pytest.fixture(scope="session")
def two_lines():
    """Two disjoint lines."""
    return IncidenceStructure(range(6), [(0, 1, 2), (3, 4, 5)])
