"""Symplectic Pauli strings and the encoded images of fermionic terms.

A :class:`PauliString` is ``i**phase`` times a tensor product of letters,
where qubit ``q`` carries ``X`` if only its x-bit is set, ``Z`` if only its
z-bit is set and ``Y`` if both are. Products follow ``XZ = -iY``.

Hamiltonian terms are built here by multiplying Majorana images, never from
closed-form weight formulas, so this module can check :mod:`fqmap.cost`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .bitmat import bits_of, popcount
from .encodings import EncodingKind, LinearEncoding

__all__ = [
    "PauliString",
    "WeightedTerm",
    "Hamiltonian",
    "PauliSum",
    "mul",
    "commutes",
    "majorana_images",
    "annihilation",
    "hopping_terms",
    "interaction_term",
    "number_term",
    "assemble_hamiltonian",
    "format_term",
    "COEFF_OF_CLASS",
]

_LETTERS = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}


@dataclass(frozen=True)
class PauliString:
    width: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self):
        if self.width < 0:
            raise ValueError("negative width")
        limit = 1 << self.width
        if not (0 <= self.x < limit and 0 <= self.z < limit):
            raise ValueError(f"masks do not fit in {self.width} qubits")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def from_label(cls, label: str, width: int | None = None) -> "PauliString":
        """Parse ``"X0 Z1 Y3"`` (or ``"I"``), optionally prefixed by a sign."""
        phase = 0
        text = label.strip()
        for prefix, k in (("-i", 3), ("+i", 1), ("i", 1), ("-", 2), ("+", 0)):
            if text.startswith(prefix) and text[len(prefix):len(prefix) + 1] in (" ", "X", "Y", "Z", "I"):
                phase = k
                text = text[len(prefix):].strip()
                break
        x = z = 0
        top = -1
        for tok in text.split():
            if tok == "I":
                continue
            letter, q = tok[0], int(tok[1:])
            top = max(top, q)
            if letter in "XY":
                x |= 1 << q
            if letter in "ZY":
                z |= 1 << q
            if letter not in "XYZ":
                raise ValueError(f"bad Pauli token {tok!r}")
        if width is None:
            width = top + 1
        return cls(width, x, z, phase)

    @classmethod
    def x_on(cls, width: int, mask: int) -> "PauliString":
        return cls(width, mask, 0)

    @classmethod
    def z_on(cls, width: int, mask: int) -> "PauliString":
        return cls(width, 0, mask)

    @property
    def support(self) -> int:
        return self.x | self.z

    @property
    def weight(self) -> int:
        return popcount(self.x | self.z)

    def letter(self, q: int) -> str:
        return _LETTERS[((self.x >> q) & 1, (self.z >> q) & 1)]

    def is_identity(self) -> bool:
        return not (self.x or self.z)

    def is_hermitian(self) -> bool:
        return self.phase % 2 == 0

    def without_phase(self) -> "PauliString":
        return PauliString(self.width, self.x, self.z, 0)

    def extend(self, width: int) -> "PauliString":
        if width < self.width:
            raise ValueError("cannot shrink a Pauli string")
        return PauliString(width, self.x, self.z, self.phase)

    def label(self) -> str:
        toks = [f"{self.letter(q)}{q}" for q in bits_of(self.x | self.z)]
        return " ".join(toks) if toks else "I"

    def __mul__(self, other: "PauliString") -> "PauliString":
        return mul(self, other)

    def __str__(self) -> str:
        sign = ("", "i ", "-", "-i ")[self.phase]
        return sign + self.label()


def _check_width(p: PauliString, q: PauliString) -> None:
    if p.width != q.width:
        raise ValueError(f"width mismatch: {p.width} vs {q.width}")


def mul(p: PauliString, q: PauliString) -> PauliString:
    _check_width(p, q)
    # letter(x, z) = i^{|x&z|} X^x Z^z; moving Z^{z1} past X^{x2} costs (-1)^{|z1&x2|}
    x = p.x ^ q.x
    z = p.z ^ q.z
    k = (
        p.phase
        + q.phase
        + popcount(p.x & p.z)
        + popcount(q.x & q.z)
        + 2 * popcount(p.z & q.x)
        - popcount(x & z)
    )
    return PauliString(p.width, x, z, k)


def commutes(p: PauliString, q: PauliString) -> bool:
    _check_width(p, q)
    return popcount((p.x & q.z) ^ (p.z & q.x)) % 2 == 0


class PauliSum:
    """Linear combination of phase-free Pauli strings, keyed by ``(x, z)``."""

    __slots__ = ("width", "terms")

    def __init__(self, width: int, terms: dict | None = None):
        self.width = width
        self.terms: dict[tuple[int, int], complex] = dict(terms or {})

    @classmethod
    def from_pauli(cls, p: PauliString, coeff: complex = 1.0) -> "PauliSum":
        return cls(p.width, {(p.x, p.z): coeff * 1j ** p.phase})

    @classmethod
    def identity(cls, width: int, coeff: complex = 1.0) -> "PauliSum":
        return cls(width, {(0, 0): complex(coeff)})

    def __add__(self, other: "PauliSum") -> "PauliSum":
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out.get(key, 0) + c
        return PauliSum(self.width, out)

    def scale(self, c: complex) -> "PauliSum":
        return PauliSum(self.width, {k: v * c for k, v in self.terms.items()})

    def __rmul__(self, c: complex) -> "PauliSum":
        return self.scale(c)

    def __matmul__(self, other: "PauliSum") -> "PauliSum":
        out: dict[tuple[int, int], complex] = {}
        for (x1, z1), c1 in self.terms.items():
            a = PauliString(self.width, x1, z1)
            for (x2, z2), c2 in other.terms.items():
                prod = mul(a, PauliString(self.width, x2, z2))
                key = (prod.x, prod.z)
                out[key] = out.get(key, 0) + c1 * c2 * 1j ** prod.phase
        return PauliSum(self.width, out)

    def dagger(self) -> "PauliSum":
        return PauliSum(self.width, {k: v.conjugate() for k, v in self.terms.items()})

    def pruned(self, tol: float = 1e-12) -> "PauliSum":
        return PauliSum(self.width, {k: v for k, v in self.terms.items() if abs(v) > tol})

    def items(self) -> Iterator[tuple[PauliString, complex]]:
        for (x, z), c in self.terms.items():
            yield PauliString(self.width, x, z), c


@dataclass(frozen=True)
class WeightedTerm:
    """``coeff * op``; ``kind`` is ``"num"``, ``"hop"`` or ``"int"`` and
    ``modes`` the qubit-order positions the fermionic term acts on."""

    coeff: complex
    op: PauliString
    kind: str = ""
    modes: tuple[int, ...] = ()

    @property
    def weight(self) -> int:
        return self.op.weight

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        value = self.coeff * 1j ** self.op.phase
        return abs(value.imag) <= tol


@dataclass(frozen=True)
class Hamiltonian:
    width: int
    terms: tuple[WeightedTerm, ...]
    encoding: EncodingKind | None = None
    ancillas: int = 0

    def __iter__(self) -> Iterator[WeightedTerm]:
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __getitem__(self, k: int) -> WeightedTerm:
        return self.terms[k]

    def weights(self, include_identity: bool = False) -> list[int]:
        return [t.weight for t in self.terms if include_identity or not t.op.is_identity()]

    def total_weight(self, kinds: Iterable[str] | None = None) -> int:
        kinds = None if kinds is None else set(kinds)
        return sum(t.weight for t in self.terms if kinds is None or t.kind in kinds)

    def max_weight(self) -> int:
        return max(self.weights(), default=0)


def _check_mode(enc: LinearEncoding, i: int) -> None:
    if not 0 <= i < enc.n:
        raise IndexError(f"mode {i} out of range for {enc.n} modes")


def majorana_images(enc: LinearEncoding, i: int) -> tuple[PauliString, PauliString]:
    """Images of ``gamma_i`` and ``gamma_bar_i`` with their exact real signs.

    ``gamma_i -> X_U(i) Z_P(i)`` and ``gamma_bar_i -> i X_U(i) Z_R(i)`` as
    operator products; converting to letter form leaves a phase of +1 or -1.
    """
    _check_mode(enc, i)
    u = enc.update_set(i)
    p = enc.parity_set(i)
    r = enc.remainder_set(i)
    overlap_p = popcount(u & p)
    overlap_r = popcount(u & r)
    if overlap_p % 2 or not overlap_r % 2:
        raise ValueError(f"encoding violates the Majorana overlap rule at mode {i}")
    gamma = PauliString(enc.n, u, p, -overlap_p)
    gamma_bar = PauliString(enc.n, u, r, 1 - overlap_r)
    return gamma, gamma_bar


def annihilation(enc: LinearEncoding, i: int) -> PauliSum:
    """``a_i = (gamma_i + i gamma_bar_i) / 2`` as a Pauli sum."""
    g, gb = majorana_images(enc, i)
    return PauliSum.from_pauli(g, 0.5) + PauliSum.from_pauli(gb, 0.5j)


def _to_terms(s: PauliSum, kind: str, modes: tuple[int, ...]) -> list[WeightedTerm]:
    s = s.pruned()
    out = [WeightedTerm(c, p, kind, modes) for p, c in s.items()]
    out.sort(key=lambda t: (t.op.weight, t.op.z, t.op.x))
    return out


def hopping_terms(enc: LinearEncoding, i: int, j: int, coeff: complex) -> list[WeightedTerm]:
    """Pauli expansion of ``c a_i^dag a_j + c^* a_j^dag a_i``."""
    _check_mode(enc, i)
    _check_mode(enc, j)
    if i == j:
        raise ValueError("hopping needs two distinct modes")
    coeff = complex(coeff)
    if coeff == 0:
        raise ValueError("hopping coefficient must be nonzero")
    ai, aj = annihilation(enc, i), annihilation(enc, j)
    h = coeff * (ai.dagger() @ aj) + coeff.conjugate() * (aj.dagger() @ ai)
    return _to_terms(h, "hop", (min(i, j), max(i, j)))


def number_term(enc: LinearEncoding, i: int) -> list[WeightedTerm]:
    ai = annihilation(enc, i)
    return _to_terms(ai.dagger() @ ai, "num", (i,))


def interaction_term(enc: LinearEncoding, i: int, j: int) -> list[WeightedTerm]:
    _check_mode(enc, i)
    _check_mode(enc, j)
    if i == j:
        raise ValueError("interaction needs two distinct modes")
    ai, aj = annihilation(enc, i), annihilation(enc, j)
    h = (ai.dagger() @ ai) @ (aj.dagger() @ aj)
    return _to_terms(h, "int", (min(i, j), max(i, j)))


# unit coefficient used for each hopping class when a graph carries only the class
COEFF_OF_CLASS = {"real": 1.0 + 0j, "imag": 1j, "complex": 1.0 + 1.0j}


def assemble_hamiltonian(graph, enc: LinearEncoding, order: Sequence[int] | None = None) -> Hamiltonian:
    """Encoded qubit Hamiltonian of ``graph`` with vertex ``v`` placed at mode ``order[v]``.

    Terms are kept per fermionic source (nothing is merged across sources),
    identity terms included.
    """
    from .graphs import check_order

    if enc.n != graph.n:
        raise ValueError(f"encoding has {enc.n} modes but graph has {graph.n} vertices")
    sigma = check_order(order, graph.n)
    terms: list[WeightedTerm] = []
    for v in range(graph.n):
        if graph.number_terms[v]:
            terms.extend(number_term(enc, sigma[v]))
    for e in graph.edges:
        i, j = sorted((sigma[e.u], sigma[e.v]))
        if e.hopping:
            terms.extend(hopping_terms(enc, i, j, COEFF_OF_CLASS[e.coeff]))
        if e.interaction:
            terms.extend(interaction_term(enc, i, j))
    return Hamiltonian(enc.n, tuple(terms), enc.kind)


def _fmt_float(v: float) -> str:
    v = 0.0 if v == 0 else v
    return repr(float(v))


def format_term(t: WeightedTerm) -> str:
    c = t.coeff * 1j ** t.op.phase
    return f"({_fmt_float(c.real)},{_fmt_float(c.imag)}) {t.op.label()}"
