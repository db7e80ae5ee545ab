"""Linear fermion-qubit encodings: the matrix ``U`` and its derived sets.

A linear encoding sends the Fock bitstring ``f`` to the qubit basis state
``U f``. Everything the Hamiltonian construction needs is read off four
matrices:

* ``U``  column ``j`` lists the qubits that store mode ``j``'s occupation,
* ``F = U^-1``,
* ``P`` row ``i`` is ``F_0 ^ ... ^ F_{i-1}`` (parity set of mode ``i``),
* ``R = P + F``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from .bitmat import BinaryMatrix, SingularMatrix, invert, matvec, mask_of

__all__ = [
    "EncodingKind",
    "LinearEncoding",
    "PruningFailed",
    "build_encoding",
    "derive_pr",
    "encode_state",
    "bravyi_kitaev_matrix",
    "ternary_tree_matrix",
    "ternary_tree_sizes",
]


class PruningFailed(ValueError):
    """The pruned ternary-tree matrix is singular for the requested size."""


class EncodingKind(enum.Enum):
    JORDAN_WIGNER = "jw"
    PARITY_BASIS = "pb"
    BRAVYI_KITAEV = "bk"
    TERNARY_TREE = "tt"

    @classmethod
    def parse(cls, value: "str | EncodingKind") -> "EncodingKind":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        aliases = {
            "jordan_wigner": "jw",
            "jordanwigner": "jw",
            "parity_basis": "pb",
            "paritybasis": "pb",
            "parity": "pb",
            "bravyi_kitaev": "bk",
            "bravyikitaev": "bk",
            "ternary_tree": "tt",
            "ternarytree": "tt",
        }
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown encoding {value!r}; expected one of jw, pb, bk, tt") from None


@dataclass(frozen=True)
class LinearEncoding:
    kind: EncodingKind
    n: int
    U: BinaryMatrix
    F: BinaryMatrix
    P: BinaryMatrix
    R: BinaryMatrix

    def __post_init__(self):
        for name in ("U", "F", "P", "R"):
            if getattr(self, name).shape != (self.n, self.n):
                raise ValueError(f"{name} must be {self.n}x{self.n}")

    def update_set(self, i: int) -> int:
        """Packed ``U(i)``: qubits holding mode ``i`` (column ``i`` of ``U``)."""
        return self.U.col(i)

    def flip_set(self, i: int) -> int:
        return self.F.row(i)

    def parity_set(self, i: int) -> int:
        return self.P.row(i)

    def remainder_set(self, i: int) -> int:
        return self.R.row(i)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "n": self.n,
            "U": self.U.to_bitstrings(),
            "F": self.F.to_bitstrings(),
            "P": self.P.to_bitstrings(),
            "R": self.R.to_bitstrings(),
        }


def derive_pr(U: BinaryMatrix) -> tuple[BinaryMatrix, BinaryMatrix, BinaryMatrix]:
    """Return ``(F, P, R)`` for an invertible ``U``."""
    F = invert(U)
    n = F.nrows
    prows = []
    acc = 0
    for i in range(n):
        prows.append(acc)
        acc ^= F.row(i)
    P = BinaryMatrix(prows, n)
    return F, P, P + F


def bravyi_kitaev_matrix(n: int) -> BinaryMatrix:
    """Fenwick-tree matrix: column ``j`` is set at ``j`` and its update chain below ``n``."""
    rows = [0] * n
    for j in range(n):
        k = j + 1
        while k <= n:
            rows[k - 1] |= 1 << j
            k += k & -k
    return BinaryMatrix(rows, n)


def ternary_tree_sizes(limit: int) -> list[int]:
    sizes = [1]
    while sizes[-1] < limit:
        sizes.append(3 * sizes[-1] + 1)
    return sizes


def _half_turn(rows: Sequence[int], m: int) -> list[int]:
    # B_{i,j} = A_{m-1-i, m-1-j}
    out = [0] * m
    for r in range(m):
        row = rows[r]
        for c in range(m):
            if (row >> c) & 1:
                out[m - 1 - r] |= 1 << (m - 1 - c)
    return out


def ternary_tree_matrix(n: int) -> BinaryMatrix:
    """Expand the ternary-tree recursion to the first size ``>= n`` and prune.

    Each step maps an ``m x m`` block ``T`` to the ``(3m+1) x (3m+1)`` matrix
    with diagonal blocks ``T``, ``1``, ``T`` turned by 180 degrees, ``T``, and
    the middle row set over the first two blocks and the third. At the
    canonical sizes 1, 4, 13, 40, ... every Majorana image then has weight
    equal to the tree depth. The result for ``n`` is the leading principal
    ``n x n`` submatrix.
    """
    rows = [1]
    m = 1
    while m < n:
        ones = (1 << m) - 1
        new = list(rows)
        new.append(ones | (1 << m) | (ones << (m + 1)))
        new.extend(r << (m + 1) for r in _half_turn(rows, m))
        new.extend(r << (2 * m + 1) for r in rows)
        rows = new
        m = 3 * m + 1
    keep = (1 << n) - 1
    return BinaryMatrix([r & keep for r in rows[:n]], n)


def build_encoding(kind: "EncodingKind | str", n: int) -> LinearEncoding:
    kind = EncodingKind.parse(kind)
    if n < 1:
        raise ValueError(f"need at least one mode, got n={n}")
    if kind is EncodingKind.JORDAN_WIGNER:
        U = BinaryMatrix.identity(n)
    elif kind is EncodingKind.PARITY_BASIS:
        U = BinaryMatrix.lower_ones(n)
    elif kind is EncodingKind.BRAVYI_KITAEV:
        U = bravyi_kitaev_matrix(n)
    else:
        U = ternary_tree_matrix(n)
    try:
        F, P, R = derive_pr(U)
    except SingularMatrix as exc:
        if kind is EncodingKind.TERNARY_TREE:
            raise PruningFailed(f"pruned ternary tree matrix is singular for n={n}") from exc
        raise
    return LinearEncoding(kind, n, U, F, P, R)


def encode_state(enc: LinearEncoding, f: "Sequence[int] | str") -> list[int]:
    """Qubit basis state ``U f`` for occupation vector ``f`` (mode 0 first)."""
    if isinstance(f, str):
        f = [int(ch) for ch in f]
    if len(f) != enc.n:
        raise ValueError(f"occupation vector has length {len(f)}, expected {enc.n}")
    packed = matvec(enc.U, mask_of(k for k, b in enumerate(f) if int(b) % 2))
    return [(packed >> k) & 1 for k in range(enc.n)]
