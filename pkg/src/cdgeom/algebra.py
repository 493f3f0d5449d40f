"""Cayley-Dickson multiplication over the canonical basis.

A level-N algebra has 2**N basis units e_0 .. e_{2**N - 1}. Unit e_a with
a < 2**(N-1) is the pair (e_a, 0); otherwise it is (0, e_{a - 2**(N-1)}).
Pairs multiply by the doubling rule

    (x, y)(X, Y) = (xX - Y y*, x* Y + X y),    (x, y)* = (x*, -y)

so the product of two units is always a signed unit whose index is the
bitwise XOR of the operands.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import NamedTuple, Sequence

import numpy as np

DEFAULT_MAX_LEVEL = 12


class LevelBoundError(ValueError):
    """Requested level exceeds the configured resource bound."""


class SignedUnit(NamedTuple):
    sign: int
    index: int

    def __neg__(self) -> "SignedUnit":
        return SignedUnit(-self.sign, self.index)

    def __str__(self) -> str:
        return f"{'+' if self.sign > 0 else '-'}{self.index}"

    @classmethod
    def parse(cls, token: str) -> "SignedUnit":
        token = token.strip().replace("−", "-")
        if not token or token[0] not in "+-":
            raise ValueError(f"signed unit token must start with + or -: {token!r}")
        return cls(1 if token[0] == "+" else -1, int(token[1:]))


def _check_index(level: int, *indices: int) -> None:
    if level < 0:
        raise ValueError(f"level must be non-negative, got {level}")
    size = 1 << level
    for a in indices:
        if not 0 <= a < size:
            raise IndexError(f"unit index {a} out of range for level {level} (size {size})")


def basis_conjugate(level: int, a: int) -> SignedUnit:
    _check_index(level, a)
    return SignedUnit(1, 0) if a == 0 else SignedUnit(-1, a)


def cd_basis_product(level: int, a: int, b: int) -> SignedUnit:
    """Return e_a * e_b at the given level as a signed unit.

    Walks down the doubling one level at a time; each step picks one of the
    four block cases of the doubling rule and may swap or negate operands.
    The result index is accumulated from the block each step lands in.
    """
    _check_index(level, a, b)
    sign = 1
    index = 0
    for n in range(level, 0, -1):
        half = 1 << (n - 1)
        if a < half and b < half:
            # (x, 0)(X, 0) = (xX, 0)
            continue
        if a < half:
            # (x, 0)(0, Y) = (0, x* Y)
            if a != 0:
                sign = -sign
            b -= half
            index += half
        elif b < half:
            # (0, y)(X, 0) = (0, X y)
            a, b = b, a - half
            index += half
        else:
            # (0, y)(0, Y) = (-Y y*, 0)
            a, b = b - half, a - half
            if b == 0:
                sign = -sign
    # level 0: e_0 e_0 = e_0
    return SignedUnit(sign, index)


class MultTable:
    """Signed multiplication table of a level-N algebra.

    ``signs[a, b]`` and ``units[a, b]`` hold the sign and index of e_a e_b.
    Both arrays are read-only; instances are immutable.
    """

    __slots__ = ("level", "signs", "units")

    def __init__(self, level: int, signs: np.ndarray, units: np.ndarray):
        size = 1 << level
        signs = np.array(signs, dtype=np.int8, copy=True)
        units = np.array(units, dtype=np.int64, copy=True)
        if signs.shape != (size, size) or units.shape != (size, size):
            raise ValueError(f"table arrays do not have shape ({size}, {size})")
        if not np.isin(signs, (-1, 1)).all():
            raise ValueError("signs must be +1 or -1")
        if units.size and (units.min() < 0 or units.max() >= size):
            raise ValueError("unit index out of range")
        signs.setflags(write=False)
        units.setflags(write=False)
        object.__setattr__(self, "level", level)
        object.__setattr__(self, "signs", signs)
        object.__setattr__(self, "units", units)

    def __setattr__(self, name, value):
        raise AttributeError("MultTable is immutable")

    @property
    def size(self) -> int:
        return 1 << self.level

    def __getitem__(self, ab: tuple[int, int]) -> SignedUnit:
        a, b = ab
        _check_index(self.level, a, b)
        return SignedUnit(int(self.signs[a, b]), int(self.units[a, b]))

    def entries(self):
        """Yield ((a, b), SignedUnit) in row-major order."""
        n = self.size
        for a in range(n):
            signs, units = self.signs[a].tolist(), self.units[a].tolist()
            for b in range(n):
                yield (a, b), SignedUnit(signs[b], units[b])

    def __eq__(self, other):
        if not isinstance(other, MultTable):
            return NotImplemented
        return (
            self.level == other.level
            and np.array_equal(self.signs, other.signs)
            and np.array_equal(self.units, other.units)
        )

    def __hash__(self):
        return hash((self.level, self.signs.tobytes(), self.units.tobytes()))

    def __repr__(self):
        return f"MultTable(level={self.level})"

    def xor_violations(self) -> list[tuple[int, int]]:
        r = np.arange(self.size)
        bad = np.argwhere(self.units != (r[:, None] ^ r[None, :]))
        return [(int(a), int(b)) for a, b in bad]

    def check_invariants(self) -> list[str]:
        """Return a list of violated table invariants (empty when sound)."""
        problems = []
        s = self.signs.astype(np.int64)
        u = self.units
        r = np.arange(self.size)
        if not ((s[0, :] == 1).all() and (s[:, 0] == 1).all()
                and (u[0, :] == r).all() and (u[:, 0] == r).all()):
            problems.append("identity row/column is not +e_b / +e_a")
        if not ((np.diagonal(s)[1:] == -1).all() and (np.diagonal(u)[1:] == 0).all()):
            problems.append("imaginary units do not square to -e_0")
        if self.xor_violations():
            problems.append("product index differs from a XOR b")
        inner = s[1:, 1:]
        off = ~np.eye(self.size - 1, dtype=bool)
        if not (inner[off] == -inner.T[off]).all():
            problems.append("distinct imaginary units do not anticommute")
        return problems


def _double(prev: MultTable) -> MultTable:
    half = prev.size
    s, u = prev.signs, prev.units
    conj = -np.ones(half, dtype=np.int8)
    conj[0] = 1
    signs = np.empty((2 * half, 2 * half), dtype=np.int8)
    units = np.empty((2 * half, 2 * half), dtype=np.int64)
    # (x, 0)(X, 0) = (xX, 0)
    signs[:half, :half] = s
    units[:half, :half] = u
    # (x, 0)(0, Y) = (0, x* Y)
    signs[:half, half:] = conj[:, None] * s
    units[:half, half:] = u + half
    # (0, y)(X, 0) = (0, X y)
    signs[half:, :half] = s.T
    units[half:, :half] = u.T + half
    # (0, y)(0, Y) = (-Y y*, 0)
    signs[half:, half:] = -conj[:, None] * s.T
    units[half:, half:] = u.T
    return MultTable(prev.level + 1, signs, units)


@lru_cache(maxsize=None)
def _table(level: int) -> MultTable:
    if level == 0:
        return MultTable(0, [[1]], [[0]])
    return _double(_table(level - 1))


def build_table(level: int, max_level: int = DEFAULT_MAX_LEVEL) -> MultTable:
    """Full 2**N x 2**N table, built bottom-up by block doubling.

    Tables are cached per level. ``max_level`` guards memory: level 12 is
    already 16M entries per array.
    """
    if level < 0:
        raise ValueError(f"level must be non-negative, got {level}")
    if level > max_level:
        raise LevelBoundError(f"level {level} exceeds bound {max_level}")
    return _table(level)


def verify_subalgebra_nesting(upper: MultTable, lower: MultTable) -> bool:
    if upper.level - lower.level != 1:
        raise ValueError(
            f"nesting check needs consecutive levels, got {upper.level} and {lower.level}"
        )
    n = lower.size
    return bool(
        np.array_equal(upper.signs[:n, :n], lower.signs)
        and np.array_equal(upper.units[:n, :n], lower.units)
    )


class CDElement:
    """Element of a level-N algebra as 2**N exact coordinates."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence):
        coeffs = tuple(Fraction(c) if not isinstance(c, Rational) else c for c in coeffs)
        n = len(coeffs)
        if n == 0 or n & (n - 1):
            raise ValueError(f"coefficient count must be a power of two, got {n}")
        self.coeffs = coeffs

    @property
    def level(self) -> int:
        return len(self.coeffs).bit_length() - 1

    @classmethod
    def basis(cls, level: int, a: int, sign: int = 1) -> "CDElement":
        _check_index(level, a)
        coeffs = [0] * (1 << level)
        coeffs[a] = sign
        return cls(coeffs)

    @classmethod
    def zero(cls, level: int) -> "CDElement":
        return cls([0] * (1 << level))

    def halves(self) -> tuple["CDElement", "CDElement"]:
        h = len(self.coeffs) // 2
        return CDElement(self.coeffs[:h]), CDElement(self.coeffs[h:])

    @classmethod
    def pair(cls, x: "CDElement", y: "CDElement") -> "CDElement":
        return cls(x.coeffs + y.coeffs)

    def conjugate(self) -> "CDElement":
        return CDElement((self.coeffs[0],) + tuple(-c for c in self.coeffs[1:]))

    def __add__(self, other: "CDElement") -> "CDElement":
        _same_level(self, other)
        return CDElement(tuple(p + q for p, q in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "CDElement") -> "CDElement":
        _same_level(self, other)
        return CDElement(tuple(p - q for p, q in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "CDElement":
        return CDElement(tuple(-c for c in self.coeffs))

    def __mul__(self, other: "CDElement") -> "CDElement":
        return element_multiply(self.level, self, other)

    def __eq__(self, other):
        if not isinstance(other, CDElement):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"CDElement({[str(c) for c in self.coeffs]})"

    def as_signed_unit(self) -> SignedUnit | None:
        """The signed unit this element equals, or None if it is not one."""
        nonzero = [(i, c) for i, c in enumerate(self.coeffs) if c != 0]
        if len(nonzero) != 1 or abs(nonzero[0][1]) != 1:
            return None
        i, c = nonzero[0]
        return SignedUnit(int(c), i)


def _same_level(x: CDElement, y: CDElement) -> None:
    if len(x.coeffs) != len(y.coeffs):
        raise ValueError(f"operands at different levels: {x.level} and {y.level}")


def _conj(v: tuple) -> tuple:
    return (v[0],) + tuple(-c for c in v[1:])


def _mul(x: tuple, y: tuple) -> tuple:
    n = len(x)
    if n == 1:
        return (x[0] * y[0],)
    if not any(x) or not any(y):
        return (0,) * n
    h = n // 2
    a, b, c, d = x[:h], x[h:], y[:h], y[h:]
    lo = tuple(p - q for p, q in zip(_mul(a, c), _mul(d, _conj(b))))
    hi = tuple(p + q for p, q in zip(_mul(_conj(a), d), _mul(c, b)))
    return lo + hi


def element_multiply(level: int, x: CDElement, y: CDElement) -> CDElement:
    """Full element-level product by the doubling rule.

    Independent of the unit-level recursion, so it serves as an oracle for
    the tables. Zero halves are skipped, which keeps products of sparse
    operands cheap; dense operands cost O(4**N).
    """
    if x.level != level or y.level != level:
        raise ValueError(f"operands at levels {x.level}, {y.level}; expected {level}")
    return CDElement(_mul(x.coeffs, y.coeffs))


def table_multiply(table: MultTable, x: CDElement, y: CDElement) -> CDElement:
    """Bilinear expansion of x * y through the table's unit products."""
    if x.level != table.level or y.level != table.level:
        raise ValueError("operands do not match table level")
    out = [0] * table.size
    signs, units = table.signs.tolist(), table.units.tolist()
    for a, xa in enumerate(x.coeffs):
        if xa == 0:
            continue
        for b, yb in enumerate(y.coeffs):
            if yb:
                out[units[a][b]] += signs[a][b] * xa * yb
    return CDElement(out)
