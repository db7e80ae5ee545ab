"""Hamiltonian graphs: data model, generators and JSON edge-list files.

Vertices are ``0..n-1``. Each edge carries the class of its hopping
coefficient (``"real"``, ``"imag"`` or ``"complex"``) and flags saying
whether it contributes a hopping term, an interaction term or both. Number
terms are flagged per vertex.
"""

from __future__ import annotations

import json
import random
from collections import deque
from dataclasses import dataclass, field, replace
from math import gcd
from pathlib import Path
from typing import Iterable, Sequence

import networkx as nx

COEFF_CLASSES = ("real", "imag", "complex")
MODEL_PRESETS = ("full", "fermi-hubbard", "hopping")


class GraphFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    coeff: str = "complex"
    hopping: bool = True
    interaction: bool = True

    def __post_init__(self):
        if self.u == self.v:
            raise ValueError(f"self-loop on vertex {self.u}")
        if self.u > self.v:
            u, v = self.v, self.u
            object.__setattr__(self, "u", u)
            object.__setattr__(self, "v", v)
        if self.coeff not in COEFF_CLASSES:
            raise ValueError(f"unknown coefficient class {self.coeff!r}")
        if not (self.hopping or self.interaction):
            raise ValueError(f"edge ({self.u}, {self.v}) has neither hopping nor interaction")

    @property
    def has_real(self) -> bool:
        return self.coeff in ("real", "complex")

    @property
    def has_imag(self) -> bool:
        return self.coeff in ("imag", "complex")

    @property
    def pair(self) -> tuple[int, int]:
        return self.u, self.v


@dataclass(frozen=True)
class HamiltonianGraph:
    n: int
    edges: tuple[Edge, ...] = ()
    number_terms: tuple[bool, ...] = field(default=())
    name: str = ""

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a graph needs at least one vertex")
        object.__setattr__(self, "edges", tuple(self.edges))
        if not self.number_terms:
            object.__setattr__(self, "number_terms", (True,) * self.n)
        else:
            object.__setattr__(self, "number_terms", tuple(bool(b) for b in self.number_terms))
        if len(self.number_terms) != self.n:
            raise ValueError("number_terms must have one flag per vertex")
        seen = set()
        for e in self.edges:
            if not (0 <= e.u < self.n and 0 <= e.v < self.n):
                raise ValueError(f"edge ({e.u}, {e.v}) out of range for n={self.n}")
            if e.pair in seen:
                raise ValueError(f"duplicate edge ({e.u}, {e.v})")
            seen.add(e.pair)

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]], name: str = "", **edge_kw) -> "HamiltonianGraph":
        """Build a full-model graph from vertex pairs, dropping loops and repeats."""
        seen = set()
        edges = []
        for a, b in pairs:
            a, b = int(a), int(b)
            if a == b:
                continue
            key = (min(a, b), max(a, b))
            if key in seen:
                continue
            seen.add(key)
            edges.append(Edge(key[0], key[1], **edge_kw))
        return cls(n, tuple(edges), name=name)

    @property
    def m(self) -> int:
        return len(self.edges)

    def pairs(self) -> list[tuple[int, int]]:
        return [e.pair for e in self.edges]

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for e in self.edges:
            deg[e.u] += 1
            deg[e.v] += 1
        return deg

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for e in self.edges:
            adj[e.u].append(e.v)
            adj[e.v].append(e.u)
        return adj

    def with_model(self, preset: str) -> "HamiltonianGraph":
        return apply_model(self, preset)


def apply_model(graph: HamiltonianGraph, preset: str) -> HamiltonianGraph:
    """Overwrite edge classes and flags with a named model preset.

    ``full``: complex hopping, interaction and number terms.
    ``fermi-hubbard``: real hopping and interaction, no number terms.
    ``hopping``: complex hopping only.
    """
    if preset == "full":
        kw, number = dict(coeff="complex", hopping=True, interaction=True), True
    elif preset in ("fermi-hubbard", "fh"):
        kw, number = dict(coeff="real", hopping=True, interaction=True), False
    elif preset == "hopping":
        kw, number = dict(coeff="complex", hopping=True, interaction=False), False
    else:
        raise ValueError(f"unknown model preset {preset!r}; expected one of {MODEL_PRESETS}")
    edges = tuple(replace(e, **kw) for e in graph.edges)
    return HamiltonianGraph(graph.n, edges, (number,) * graph.n, graph.name)


def check_order(order: Sequence[int] | None, n: int) -> tuple[int, ...]:
    """Validate ``order[v] = position`` as a bijection onto ``range(n)``."""
    if order is None:
        return tuple(range(n))
    sigma = tuple(int(p) for p in order)
    if len(sigma) != n or sorted(sigma) != list(range(n)):
        raise ValueError(f"order is not a bijection onto range({n}): {list(sigma)}")
    return sigma


def inverse_order(sigma: Sequence[int]) -> list[int]:
    inv = [0] * len(sigma)
    for v, p in enumerate(sigma):
        inv[p] = v
    return inv


def relabel(graph: HamiltonianGraph, order: Sequence[int]) -> HamiltonianGraph:
    """Graph whose vertex ``order[v]`` is the old vertex ``v``."""
    sigma = check_order(order, graph.n)
    edges = tuple(replace(e, u=sigma[e.u], v=sigma[e.v]) for e in graph.edges)
    edges = tuple(sorted(edges, key=lambda e: e.pair))
    number = [False] * graph.n
    for v, p in enumerate(sigma):
        number[p] = graph.number_terms[v]
    return HamiltonianGraph(graph.n, edges, tuple(number), graph.name)


# generators -------------------------------------------------------------


def grid(rows: int, cols: int, periodic: bool = False) -> HamiltonianGraph:
    """``rows x cols`` square lattice; vertex ``r * cols + c`` (row-major)."""
    if rows < 1 or cols < 1:
        raise ValueError("grid dimensions must be positive")
    pairs = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                pairs.append((v, v + 1))
            elif periodic and cols > 2:
                pairs.append((v, r * cols))
            if r + 1 < rows:
                pairs.append((v, v + cols))
            elif periodic and rows > 2:
                pairs.append((v, c))
    kind = "periodic grid" if periodic else "grid"
    return HamiltonianGraph.from_pairs(rows * cols, pairs, name=f"{kind} {rows}x{cols}")


def path(n: int) -> HamiltonianGraph:
    return HamiltonianGraph.from_pairs(n, [(i, i + 1) for i in range(n - 1)], name=f"path {n}")


def cycle(n: int) -> HamiltonianGraph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return HamiltonianGraph.from_pairs(n, [(i, (i + 1) % n) for i in range(n)], name=f"cycle {n}")


def _from_networkx(g: nx.Graph, name: str) -> HamiltonianGraph:
    nodes = sorted(g.nodes())
    index = {v: k for k, v in enumerate(nodes)}
    pairs = sorted((min(index[a], index[b]), max(index[a], index[b])) for a, b in g.edges())
    return HamiltonianGraph.from_pairs(len(nodes), pairs, name=name)


def hex_lattice(dim1: int, dim2: int, periodic: bool = False) -> HamiltonianGraph:
    """Honeycomb with ``dim1`` rows and ``dim2`` columns of hexagons.

    Non-periodic instances have ``2 (dim1+1)(dim2+1) - 2`` vertices; periodic
    ones ``2 dim1 dim2`` (``dim2`` even, ``dim1 >= 2``).
    """
    if dim1 < 1 or dim2 < 1:
        raise ValueError("hex lattice dimensions must be positive")
    try:
        g = nx.hexagonal_lattice_graph(dim1, dim2, periodic=periodic)
    except nx.NetworkXError as exc:
        raise ValueError(f"invalid hex lattice dimensions ({dim1}, {dim2}): {exc}") from None
    kind = "periodic hex" if periodic else "hex"
    return _from_networkx(g, f"{kind} {dim1}x{dim2}")


def tri_lattice(dim1: int, dim2: int, periodic: bool = False) -> HamiltonianGraph:
    """Triangular lattice with ``dim1`` rows and ``dim2`` columns of triangles."""
    if dim1 < 1 or dim2 < 1:
        raise ValueError("tri lattice dimensions must be positive")
    try:
        g = nx.triangular_lattice_graph(dim1, dim2, periodic=periodic)
    except nx.NetworkXError as exc:
        raise ValueError(f"invalid tri lattice dimensions ({dim1}, {dim2}): {exc}") from None
    kind = "periodic tri" if periodic else "tri"
    return _from_networkx(g, f"{kind} {dim1}x{dim2}")


def random_regular(degree: int, n: int, seed: int = 0, max_tries: int = 10_000) -> HamiltonianGraph:
    """Random simple ``degree``-regular graph from the pairing model with rejection."""
    if degree < 0 or degree >= n or (n * degree) % 2:
        raise ValueError(f"no simple {degree}-regular graph on {n} vertices")
    rng = random.Random(seed)
    points = [v for v in range(n) for _ in range(degree)]
    for _ in range(max_tries):
        rng.shuffle(points)
        pairs = set()
        ok = True
        for a, b in zip(points[::2], points[1::2]):
            key = (min(a, b), max(a, b))
            if a == b or key in pairs:
                ok = False
                break
            pairs.add(key)
        if ok:
            return HamiltonianGraph.from_pairs(n, sorted(pairs), name=f"random {degree}-regular {n}")
    raise RuntimeError(f"pairing model failed {max_tries} times")


def random_graph(n: int, p: float, seed: int = 0, connected: bool = True) -> HamiltonianGraph:
    """Erdos-Renyi ``G(n, p)``; with ``connected`` a random spanning path is added."""
    rng = random.Random(seed)
    pairs = {(a, b) for a in range(n) for b in range(a + 1, n) if rng.random() < p}
    if connected and n > 1:
        perm = list(range(n))
        rng.shuffle(perm)
        pairs |= {tuple(sorted(ab)) for ab in zip(perm, perm[1:])}
    return HamiltonianGraph.from_pairs(n, sorted(pairs), name=f"gnp {n} {p}")


def margulis_gabber_galil(m: int) -> HamiltonianGraph:
    """Margulis-Gabber-Galil expander on ``Z_m x Z_m``; vertex ``x * m + y``."""
    if m < 2:
        raise ValueError("Margulis-Gabber-Galil needs m >= 2")
    pairs = []
    for x in range(m):
        for y in range(m):
            v = x * m + y
            for s in (1, -1):
                pairs.append((v, ((x + s * 2 * y) % m) * m + y))
                pairs.append((v, ((x + s * (2 * y + 1)) % m) * m + y))
                pairs.append((v, x * m + (y + s * 2 * x) % m))
                pairs.append((v, x * m + (y + s * (2 * x + 1)) % m))
    return HamiltonianGraph.from_pairs(m * m, pairs, name=f"margulis {m}")


def chordal_cycle(p: int) -> HamiltonianGraph:
    """Cycle on ``Z_p`` plus chords ``{x, x^-1}`` wherever the inverse exists."""
    if p < 3:
        raise ValueError("chordal cycle needs p >= 3")
    pairs = [(x, (x + 1) % p) for x in range(p)]
    for x in range(1, p):
        if gcd(x, p) == 1:
            pairs.append((x, pow(x, -1, p)))
    return HamiltonianGraph.from_pairs(p, pairs, name=f"chordal cycle {p}")


# 64-vertex instances used for the graph-family comparison
FAMILY_64 = {
    "hex": lambda seed=0: hex_lattice(2, 10),
    "tri": lambda seed=0: tri_lattice(7, 14),
    "periodic-hex": lambda seed=0: hex_lattice(4, 8, periodic=True),
    "periodic-tri": lambda seed=0: tri_lattice(8, 16, periodic=True),
    "random-3-regular": lambda seed=0: random_regular(3, 64, seed),
    "margulis": lambda seed=0: margulis_gabber_galil(8),
    "chordal-cycle": lambda seed=0: chordal_cycle(64),
}

GENERATORS = {
    "grid": grid,
    "path": path,
    "cycle": cycle,
    "hex": hex_lattice,
    "tri": tri_lattice,
    "random-regular": random_regular,
    "random": random_graph,
    "margulis": margulis_gabber_galil,
    "chordal-cycle": chordal_cycle,
}


def generate(kind: str, **params) -> HamiltonianGraph:
    try:
        gen = GENERATORS[kind]
    except KeyError:
        raise ValueError(f"unknown generator {kind!r}; known: {sorted(GENERATORS)}") from None
    return gen(**params)


# JSON files -------------------------------------------------------------


def graph_to_dict(graph: HamiltonianGraph) -> dict:
    out = {
        "n": graph.n,
        "number_terms": all(graph.number_terms) if len(set(graph.number_terms)) == 1 else list(graph.number_terms),
        "edges": [[e.u, e.v, {"coeff": e.coeff, "hopping": e.hopping, "interaction": e.interaction}] for e in graph.edges],
    }
    if graph.name:
        out["name"] = graph.name
    return out


def graph_from_dict(data: dict) -> HamiltonianGraph:
    if not isinstance(data, dict):
        raise GraphFormatError("graph file must hold a JSON object")
    if "n" not in data:
        raise GraphFormatError("graph file is missing the 'n' field")
    n = data["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise GraphFormatError(f"'n' must be a positive integer, got {n!r}")
    number = data.get("number_terms", True)
    if isinstance(number, bool):
        number = (number,) * n
    elif not (isinstance(number, list) and len(number) == n):
        raise GraphFormatError("'number_terms' must be a bool or a list with one bool per vertex")
    edges = []
    for k, item in enumerate(data.get("edges", [])):
        try:
            u, v = item[0], item[1]
            attrs = item[2] if len(item) > 2 else {}
            unknown = set(attrs) - {"coeff", "hopping", "interaction"}
            if unknown:
                raise ValueError(f"unknown edge attributes {sorted(unknown)}")
            edges.append(
                Edge(
                    int(u),
                    int(v),
                    attrs.get("coeff", "complex"),
                    bool(attrs.get("hopping", True)),
                    bool(attrs.get("interaction", True)),
                )
            )
        except (TypeError, IndexError, ValueError, AttributeError) as exc:
            raise GraphFormatError(f"edge #{k} {item!r}: {exc}") from None
    try:
        return HamiltonianGraph(n, tuple(edges), tuple(number), data.get("name", ""))
    except ValueError as exc:
        raise GraphFormatError(str(exc)) from None


def write_graph(graph: HamiltonianGraph, path: str | Path) -> None:
    d = graph_to_dict(graph)
    lines = ['{', f'  "n": {d["n"]},', f'  "number_terms": {json.dumps(d["number_terms"])},']
    if "name" in d:
        lines.append(f'  "name": {json.dumps(d["name"])},')
    body = ",\n".join("    " + json.dumps(e) for e in d["edges"])
    lines.append('  "edges": [' + ("\n" + body + "\n  " if body else "") + "]")
    lines.append("}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_graph(path: str | Path) -> HamiltonianGraph:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    try:
        return graph_from_dict(data)
    except GraphFormatError as exc:
        raise GraphFormatError(f"{path}: {exc}") from None


def bfs_order(graph: HamiltonianGraph, start: int | None = None) -> tuple[int, ...]:
    """Breadth-first order from a pseudo-peripheral vertex (or ``start``).

    Disconnected components are appended in vertex order.
    """
    adj = [sorted(a) for a in graph.adjacency()]
    if start is None:
        start = pseudo_peripheral_vertex(graph)
    seen = [False] * graph.n
    visit: list[int] = []
    for root in [start] + list(range(graph.n)):
        if seen[root]:
            continue
        seen[root] = True
        queue = deque([root])
        while queue:
            v = queue.popleft()
            visit.append(v)
            for w in sorted(adj[v], key=lambda w: (len(adj[w]), w)):
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
    sigma = [0] * graph.n
    for pos, v in enumerate(visit):
        sigma[v] = pos
    return tuple(sigma)


def _eccentric(adj: list[list[int]], root: int) -> tuple[int, int]:
    dist = {root: 0}
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    far = max(dist.values())
    cands = [v for v, d in dist.items() if d == far]
    return min(cands, key=lambda v: (len(adj[v]), v)), far


def pseudo_peripheral_vertex(graph: HamiltonianGraph) -> int:
    """George-Liu style search for a vertex of near-maximal eccentricity."""
    adj = graph.adjacency()
    v = min(range(graph.n), key=lambda v: (len(adj[v]), v))
    v, ecc = _eccentric(adj, v)
    while True:
        w, ecc2 = _eccentric(adj, v)
        if ecc2 <= ecc:
            return v
        v, ecc = w, ecc2


def mitchison_durbin_order(rows: int, cols: int) -> tuple[int, ...]:
    """Best monotone numbering of the ``rows x cols`` grid for total edge length.

    A numbering is monotone when labels increase along every row and column,
    i.e. every prefix is a staircase anchored at the top-left corner. The
    optimum over such numberings (Mitchison and Durbin's optimal pattern) is
    found by dynamic programming over staircases: the total edge length
    equals the summed edge boundary of all prefixes. Vertex ids follow
    :func:`grid` (row-major).
    """
    if rows < 1 or cols < 1:
        raise ValueError("grid dimensions must be positive")

    def cut(lam: tuple[int, ...]) -> int:
        horiz = sum(1 for x in lam if 0 < x < cols)
        vert = sum(1 for c in range(cols) if 0 < sum(1 for x in lam if x > c) < rows)
        return horiz + vert

    full = (cols,) * rows
    # best[lam] = (cost of prefixes up to lam, predecessor row index)
    best: dict[tuple[int, ...], tuple[int, int]] = {(0,) * rows: (0, -1)}
    frontier = [(0,) * rows]
    for _ in range(rows * cols):
        nxt: dict[tuple[int, ...], tuple[int, int]] = {}
        for lam in frontier:
            base = best[lam][0]
            for r in range(rows):
                if lam[r] < cols and (r == 0 or lam[r - 1] > lam[r]):
                    new = lam[:r] + (lam[r] + 1,) + lam[r + 1:]
                    c = base + (cut(new) if new != full else 0)
                    if new not in nxt or c < nxt[new][0]:
                        nxt[new] = (c, r)
        best.update(nxt)
        frontier = sorted(nxt)
    seq = []
    lam = full
    while any(lam):
        r = best[lam][1]
        seq.append(r * cols + lam[r] - 1)
        lam = lam[:r] + (lam[r] - 1,) + lam[r + 1:]
    seq.reverse()
    sigma = [0] * (rows * cols)
    for p, v in enumerate(seq):
        sigma[v] = p
    return tuple(sigma)
