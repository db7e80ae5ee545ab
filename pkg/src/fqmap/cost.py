"""Pauli-weight cost model of a linear encoding.

For positions ``i != j`` the component matrices give the weight of the
encoded terms that an edge between those positions produces:

* ``Num[i]``        number term ``Z_F(i)``,
* ``ReHop[i, j]``   the two strings from the real part of a hopping coefficient,
* ``ImHop[i, j]``   the two strings from the imaginary part,
* ``Inter[i, j]``   the three non-identity interaction strings.

Within an entry the string weights are combined with the aggregator (sum
for total weight, max for maximum weight). Bit-vector sums are over GF(2):
a hopping string has X-support ``U_i ^ U_j`` and Z-support ``P_i ^ R_j``
(etc.), so its weight is the popcount of their union.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .encodings import LinearEncoding
from .graphs import Edge, HamiltonianGraph, check_order

AGGREGATORS = ("sum", "max")


def parse_aggregator(value: str) -> str:
    key = {"total": "sum", "sum": "sum", "max": "max", "maximum": "max"}.get(str(value).lower())
    if key is None:
        raise ValueError(f"unknown objective {value!r}; expected total/sum or max")
    return key


@dataclass(frozen=True)
class CostComponents:
    n: int
    aggregator: str
    num: np.ndarray
    rehop: np.ndarray
    imhop: np.ndarray
    inter: np.ndarray

    def combine(self, *values):
        return sum(values) if self.aggregator == "sum" else max(values)

    def as_dict(self) -> dict[str, np.ndarray]:
        return {"Num": self.num, "ReHop": self.rehop, "ImHop": self.imhop, "Inter": self.inter}


def _bool_rows(masks: Sequence[int], n: int) -> np.ndarray:
    out = np.zeros((len(masks), n), dtype=bool)
    for i, m in enumerate(masks):
        for k in range(n):
            if (m >> k) & 1:
                out[i, k] = True
    return out


def _pair_weight(a: np.ndarray, b: np.ndarray, x: np.ndarray) -> np.ndarray:
    """``out[i, j] = popcount((a_i ^ b_j) | x[i, j])`` for boolean row stacks."""
    z = a[:, None, :] ^ b[None, :, :]
    return (z | x).sum(axis=2, dtype=np.int64)


def cost_components(enc: LinearEncoding, aggregator: str = "sum") -> CostComponents:
    agg = parse_aggregator(aggregator)
    n = enc.n
    F = _bool_rows(enc.F.rows, n)
    P = _bool_rows(enc.P.rows, n)
    R = _bool_rows(enc.R.rows, n)
    Ucols = _bool_rows(enc.U.columns(), n)
    xsup = Ucols[:, None, :] ^ Ucols[None, :, :]

    pr = _pair_weight(P, R, xsup)  # gamma_i gamma_bar_j
    pp = _pair_weight(P, P, xsup)  # gamma_i gamma_j
    rr = _pair_weight(R, R, xsup)  # gamma_bar_i gamma_bar_j
    fw = F.sum(axis=1, dtype=np.int64)
    ff = _pair_weight(F, F, np.zeros_like(xsup))

    if agg == "sum":
        rehop = pr + pr.T
        imhop = pp + rr
        inter = fw[:, None] + fw[None, :] + ff
    else:
        rehop = np.maximum(pr, pr.T)
        imhop = np.maximum(pp, rr)
        inter = np.maximum(np.maximum(fw[:, None], fw[None, :]), ff)
    for m in (rehop, imhop, inter):
        np.fill_diagonal(m, 0)
    return CostComponents(n, agg, fw, rehop, imhop, inter)


def active_components(edge: Edge) -> tuple[str, ...]:
    out = []
    if edge.hopping and edge.has_real:
        out.append("rehop")
    if edge.hopping and edge.has_imag:
        out.append("imhop")
    if edge.interaction:
        out.append("inter")
    return tuple(out)


def edge_cost(cc: CostComponents, i: int, j: int, edge: Edge) -> int:
    """Weight contributed by ``edge`` when its endpoints sit at positions ``i, j``."""
    if i == j:
        raise ValueError("edge endpoints must occupy distinct positions")
    parts = active_components(edge)
    if not parts:
        raise ValueError(f"edge ({edge.u}, {edge.v}) has no active cost component")
    return int(cc.combine(*(getattr(cc, name)[i, j] for name in parts)))


def edge_cost_matrix(cc: CostComponents, edge: Edge) -> np.ndarray:
    """``D[i, j]`` for every position pair, for the component set of ``edge``."""
    parts = [getattr(cc, name) for name in active_components(edge)]
    if not parts:
        raise ValueError(f"edge ({edge.u}, {edge.v}) has no active cost component")
    out = parts[0].copy()
    for m in parts[1:]:
        out = out + m if cc.aggregator == "sum" else np.maximum(out, m)
    return out


def objective(cc: CostComponents, graph: HamiltonianGraph, order: Sequence[int] | None = None) -> int:
    """Total (or maximum) Pauli weight of the encoded Hamiltonian under ``order``."""
    if cc.n != graph.n:
        raise ValueError(f"cost model has {cc.n} modes, graph has {graph.n} vertices")
    sigma = check_order(order, graph.n)
    vals = [edge_cost(cc, sigma[e.u], sigma[e.v], e) for e in graph.edges]
    vals += [int(cc.num[sigma[v]]) for v in range(graph.n) if graph.number_terms[v]]
    if not vals:
        return 0
    return sum(vals) if cc.aggregator == "sum" else max(vals)


def jw_hopping_closed_form(graph: HamiltonianGraph, order: Sequence[int] | None = None) -> int:
    """``sum_e alpha_e (|i - j| + 1)`` with ``alpha`` = 2 or 4 strings per hopping edge."""
    sigma = check_order(order, graph.n)
    total = 0
    for e in graph.edges:
        if e.hopping:
            alpha = 4 if e.coeff == "complex" else 2
            total += alpha * (abs(sigma[e.u] - sigma[e.v]) + 1)
    return total
