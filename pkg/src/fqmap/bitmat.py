"""Dense linear algebra over GF(2) with rows packed into Python integers.

Bit ``j`` of a packed row is the entry in column ``j`` (little-endian by
column index). Serialized rows are strings whose ``k``-th character is
column ``k``, so the 3x3 identity serializes as ``["100", "010", "001"]``.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np


class SingularMatrix(ValueError):
    """Raised when inverting a matrix that has no inverse over GF(2)."""


def popcount(x: int) -> int:
    return bin(x).count("1")


def bits_of(x: int) -> list[int]:
    """Indices of the set bits of ``x`` in increasing order."""
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length() - 1)
        x ^= low
    return out


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


class BinaryMatrix:
    """Immutable ``rows x cols`` matrix over GF(2)."""

    __slots__ = ("_rows", "_ncols")

    def __init__(self, rows: Sequence[int], ncols: int):
        if len(rows) < 1 or ncols < 1:
            raise ValueError("a BinaryMatrix needs at least one row and one column")
        limit = 1 << ncols
        for r in rows:
            if r < 0 or r >= limit:
                raise ValueError(f"row {r:#x} does not fit in {ncols} columns")
        self._rows = tuple(int(r) for r in rows)
        self._ncols = ncols

    # construction -----------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "BinaryMatrix":
        return cls([1 << i for i in range(n)], n)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "BinaryMatrix":
        return cls([0] * nrows, ncols)

    @classmethod
    def ones(cls, nrows: int, ncols: int) -> "BinaryMatrix":
        return cls([(1 << ncols) - 1] * nrows, ncols)

    @classmethod
    def lower_ones(cls, n: int, strict: bool = False) -> "BinaryMatrix":
        """Lower-triangular matrix of ones, diagonal included unless ``strict``."""
        shift = 0 if strict else 1
        return cls([(1 << (i + shift)) - 1 for i in range(n)], n)

    @classmethod
    def from_bitstrings(cls, rows: Sequence[str]) -> "BinaryMatrix":
        if not rows:
            raise ValueError("empty matrix")
        ncols = len(rows[0])
        packed = []
        for s in rows:
            if len(s) != ncols or set(s) - {"0", "1"}:
                raise ValueError(f"bad row bitstring {s!r}")
            packed.append(mask_of(k for k, ch in enumerate(s) if ch == "1"))
        return cls(packed, ncols)

    @classmethod
    def from_array(cls, a) -> "BinaryMatrix":
        a = np.asarray(a)
        if a.ndim != 2:
            raise ValueError("expected a 2-d array")
        return cls([mask_of(np.flatnonzero(row % 2)) for row in a], a.shape[1])

    # access -----------------------------------------------------------

    @property
    def nrows(self) -> int:
        return len(self._rows)

    @property
    def ncols(self) -> int:
        return self._ncols

    @property
    def shape(self) -> tuple[int, int]:
        return len(self._rows), self._ncols

    @property
    def rows(self) -> tuple[int, ...]:
        return self._rows

    def row(self, i: int) -> int:
        if not 0 <= i < len(self._rows):
            raise IndexError(f"row {i} out of range for {self.nrows} rows")
        return self._rows[i]

    def col(self, j: int) -> int:
        """Column ``j`` packed as an integer whose bit ``i`` is entry ``(i, j)``."""
        if not 0 <= j < self._ncols:
            raise IndexError(f"column {j} out of range for {self.ncols} columns")
        out = 0
        for i, r in enumerate(self._rows):
            if (r >> j) & 1:
                out |= 1 << i
        return out

    def columns(self) -> list[int]:
        return [self.col(j) for j in range(self._ncols)]

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        if not 0 <= j < self._ncols:
            raise IndexError(f"column {j} out of range")
        return (self.row(i) >> j) & 1

    def transpose(self) -> "BinaryMatrix":
        return BinaryMatrix(self.columns(), self.nrows)

    def to_bitstrings(self) -> list[str]:
        return ["".join("1" if (r >> k) & 1 else "0" for k in range(self._ncols)) for r in self._rows]

    def to_array(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.uint8)
        for i, r in enumerate(self._rows):
            out[i, bits_of(r)] = 1
        return out

    def is_square(self) -> bool:
        return self.nrows == self._ncols

    # arithmetic -------------------------------------------------------

    def __matmul__(self, other: "BinaryMatrix") -> "BinaryMatrix":
        return multiply(self, other)

    def __add__(self, other: "BinaryMatrix") -> "BinaryMatrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return BinaryMatrix([a ^ b for a, b in zip(self._rows, other._rows)], self._ncols)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinaryMatrix):
            return NotImplemented
        return self._ncols == other._ncols and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self._ncols, self._rows))

    def __repr__(self) -> str:
        return f"BinaryMatrix({self.to_bitstrings()!r})"


def multiply(a: BinaryMatrix, b: BinaryMatrix) -> BinaryMatrix:
    if a.ncols != b.nrows:
        raise ValueError(f"cannot multiply {a.shape} by {b.shape}")
    brows = b.rows
    out = []
    for r in a.rows:
        acc = 0
        while r:
            low = r & -r
            acc ^= brows[low.bit_length() - 1]
            r ^= low
        out.append(acc)
    return BinaryMatrix(out, b.ncols)


def matvec(a: BinaryMatrix, v: int) -> int:
    """``a @ v`` where ``v`` is a packed column vector (bit ``j`` = entry ``j``)."""
    out = 0
    for i, r in enumerate(a.rows):
        if popcount(r & v) & 1:
            out |= 1 << i
    return out


def invert(a: BinaryMatrix) -> BinaryMatrix:
    """Inverse by Gauss-Jordan elimination.

    Raises:
        ValueError: ``a`` is not square.
        SingularMatrix: some column has no pivot.
    """
    if not a.is_square():
        raise ValueError(f"cannot invert non-square matrix of shape {a.shape}")
    n = a.nrows
    work = list(a.rows)
    inv = [1 << i for i in range(n)]
    for c in range(n):
        bit = 1 << c
        pivot = next((r for r in range(c, n) if work[r] & bit), None)
        if pivot is None:
            raise SingularMatrix(f"matrix is singular (no pivot in column {c})")
        if pivot != c:
            work[c], work[pivot] = work[pivot], work[c]
            inv[c], inv[pivot] = inv[pivot], inv[c]
        for r in range(n):
            if r != c and work[r] & bit:
                work[r] ^= work[c]
                inv[r] ^= inv[c]
    return BinaryMatrix(inv, n)


def row_weight(a: BinaryMatrix, i: int) -> int:
    return popcount(a.row(i))
