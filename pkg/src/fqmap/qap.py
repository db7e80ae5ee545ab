"""Fermionic order optimization as a quadratic assignment problem.

An order places vertex ``v`` at position ``sigma[v]``. Its value is the
sum (or max) of the per-edge costs ``D_e[sigma[u], sigma[v]]`` plus the
number-term weights ``Num[sigma[v]]`` of flagged vertices.

``brute_force`` enumerates every order for small graphs. ``optimize_order``
runs simulated annealing with pair swaps (optionally segment reversals)
from several starts and finishes each run with a steepest-descent pass.
Sum objectives use incremental swap deltas; max objectives keep a histogram
of item costs and minimize ``(max, number of items at max)``
lexicographically.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cost import CostComponents, active_components, edge_cost_matrix, objective
from .graphs import HamiltonianGraph, bfs_order

BRUTE_FORCE_LIMIT = 10


class SearchTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class SearchParams:
    seed: int = 0
    restarts: int = 4
    iterations: int | None = None  # moves per restart; None -> 4000 * n
    time_limit: float | None = None  # seconds for the whole search
    initial_temperature: float | None = None  # None -> calibrated from sampled deltas
    cooling_rate: float | None = None  # per sweep of n moves; None -> cool to 1e-3 * T0
    neighborhood: str = "swap+reverse"  # "swap" or "swap+reverse"
    workers: int = 1

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.cooling_rate is not None and not 0 < self.cooling_rate < 1:
            raise ValueError("cooling_rate must lie in (0, 1)")
        if self.neighborhood not in ("swap", "swap+reverse"):
            raise ValueError(f"unknown neighborhood {self.neighborhood!r}")


@dataclass(frozen=True)
class OrderResult:
    order: tuple[int, ...]
    value: int
    proven_optimal: bool = False
    iterations: int = 0
    elapsed: float = 0.0
    restart: int = -1
    count_at_max: int = 0
    partial: bool = False


class OrderProblem:
    """Position-cost tables of one (cost model, graph) pair, flattened for fast lookups."""

    def __init__(self, cc: CostComponents, graph: HamiltonianGraph):
        if cc.n != graph.n:
            raise ValueError(f"cost model has {cc.n} modes, graph has {graph.n} vertices")
        self.cc = cc
        self.graph = graph
        self.n = graph.n
        self.is_sum = cc.aggregator == "sum"
        keys: dict[tuple[str, ...], int] = {}
        mats = []
        self.edge_u: list[int] = []
        self.edge_v: list[int] = []
        self.edge_mat: list[int] = []
        for e in graph.edges:
            key = active_components(e)
            if key not in keys:
                keys[key] = len(mats)
                mats.append(edge_cost_matrix(cc, e))
            self.edge_u.append(e.u)
            self.edge_v.append(e.v)
            self.edge_mat.append(keys[key])
        self.mats_np = np.stack(mats) if mats else np.zeros((0, self.n, self.n), dtype=np.int64)
        self.mats = [m.tolist() for m in mats]
        self.num = [int(x) for x in cc.num]
        self.flag = [1 if b else 0 for b in graph.number_terms]
        # adjacency: (neighbor, cost table, edge index)
        self.adj: list[list[tuple[int, list, int]]] = [[] for _ in range(self.n)]
        for k, (u, v, mi) in enumerate(zip(self.edge_u, self.edge_v, self.edge_mat)):
            self.adj[u].append((v, self.mats[mi], k))
            self.adj[v].append((u, self.mats[mi], k))
        self.m = len(self.edge_u)
        top = max([int(m.max()) for m in mats] + self.num + [0])
        self.max_cost = top

    # evaluation -------------------------------------------------------

    def item_costs(self, sigma: Sequence[int]) -> list[int]:
        """Edge costs followed by the number-term cost of each vertex (0 if unflagged)."""
        out = [
            self.mats[mi][sigma[u]][sigma[v]]
            for u, v, mi in zip(self.edge_u, self.edge_v, self.edge_mat)
        ]
        out += [self.num[sigma[v]] if self.flag[v] else 0 for v in range(self.n)]
        return out

    def key(self, sigma: Sequence[int]) -> tuple[int, int]:
        costs = self.item_costs(sigma)
        if self.is_sum:
            return sum(costs), 0
        top = max(costs, default=0)
        return top, costs.count(top)

    def value(self, sigma: Sequence[int]) -> int:
        return self.key(sigma)[0]

    def swap_delta(self, pos: list[int], a: int, b: int) -> int:
        """Change of the sum objective when vertices ``a`` and ``b`` trade places."""
        pa, pb = pos[a], pos[b]
        d = 0
        for w, M, _ in self.adj[a]:
            if w != b:
                pw = pos[w]
                d += M[pb][pw] - M[pa][pw]
        for w, M, _ in self.adj[b]:
            if w != a:
                pw = pos[w]
                d += M[pa][pw] - M[pb][pw]
        fa, fb = self.flag[a], self.flag[b]
        if fa != fb:
            num = self.num
            d += (fa - fb) * (num[pb] - num[pa])
        return d


# exact search ---------------------------------------------------------------


def brute_force(cc: CostComponents, graph: HamiltonianGraph, limit: int = BRUTE_FORCE_LIMIT, chunk: int = 40320) -> OrderResult:
    """Exhaustive minimum over all orders; ties go to the lexicographically smallest order."""
    n = graph.n
    if n > limit:
        raise SearchTooLarge(f"brute force is limited to n <= {limit} (got {n}); use optimize_order")
    t0 = time.perf_counter()
    prob = OrderProblem(cc, graph)
    eu = np.array(prob.edge_u, dtype=np.intp)
    ev = np.array(prob.edge_v, dtype=np.intp)
    em = np.array(prob.edge_mat, dtype=np.intp)
    num = np.asarray(cc.num, dtype=np.int64)
    flagged = np.flatnonzero(prob.flag)
    best_key = None
    best_order = None
    count = 0
    perms = itertools.permutations(range(n))
    while True:
        block = np.array(list(itertools.islice(perms, chunk)), dtype=np.intp)
        if block.size == 0:
            break
        block = block.reshape(-1, n)
        count += len(block)
        if prob.m:
            ecost = prob.mats_np[em[None, :], block[:, eu], block[:, ev]]
        else:
            ecost = np.zeros((len(block), 0), dtype=np.int64)
        ucost = num[block[:, flagged]]
        allc = np.concatenate([ecost, ucost], axis=1)
        if prob.is_sum:
            vals = allc.sum(axis=1)
            k = int(np.argmin(vals))
            key = (int(vals[k]), 0)
        else:
            tops = allc.max(axis=1) if allc.shape[1] else np.zeros(len(block), dtype=np.int64)
            k = int(np.argmin(tops))
            key = (int(tops[k]), 0)
        if best_key is None or key < best_key:
            best_key = key
            best_order = tuple(int(x) for x in block[k])
    value = best_key[0]
    at_max = 0 if prob.is_sum else prob.key(best_order)[1]
    return OrderResult(best_order, value, True, count, time.perf_counter() - t0, -1, at_max)


# heuristic search -----------------------------------------------------------


def _initial_order(prob: OrderProblem, index: int, rng: random.Random) -> list[int]:
    n = prob.n
    if index == 0:
        return list(range(n))
    if index == 1:
        return list(bfs_order(prob.graph))
    sigma = list(range(n))
    rng.shuffle(sigma)
    return sigma


class _MaxState:
    """Histogram of item costs for the bottleneck objective."""

    def __init__(self, prob: OrderProblem, pos: list[int]):
        self.prob = prob
        self.costs = prob.item_costs(pos)
        self.hist = [0] * (prob.max_cost + 2)
        for c in self.costs:
            self.hist[c] += 1
        self.top = max(self.costs, default=0)

    def energy(self) -> tuple[int, int]:
        return self.top, self.hist[self.top]

    def affected(self, verts: Sequence[int]) -> list[int]:
        prob = self.prob
        items = set()
        for a in verts:
            for _, _, k in prob.adj[a]:
                items.add(k)
            items.add(prob.m + a)
        return sorted(items)

    def cost_of(self, item: int, pos: list[int]) -> int:
        prob = self.prob
        if item < prob.m:
            return prob.mats[prob.edge_mat[item]][pos[prob.edge_u[item]]][pos[prob.edge_v[item]]]
        v = item - prob.m
        return prob.num[pos[v]] if prob.flag[v] else 0

    def update(self, items: list[int], pos: list[int]) -> list[tuple[int, int]]:
        undo = []
        hist = self.hist
        raised = self.top
        for it in items:
            old = self.costs[it]
            new = self.cost_of(it, pos)
            if new != old:
                undo.append((it, old))
                hist[old] -= 1
                hist[new] += 1
                self.costs[it] = new
                if new > raised:
                    raised = new
        top = raised
        while top > 0 and hist[top] == 0:
            top -= 1
        self.top = top
        return undo

    def revert(self, undo: list[tuple[int, int]]) -> None:
        hist = self.hist
        for it, old in undo:
            new = self.costs[it]
            hist[new] -= 1
            hist[old] += 1
            self.costs[it] = old
            if old > self.top:
                self.top = old
        while self.top > 0 and hist[self.top] == 0:
            self.top -= 1


def _scalar(key: tuple[int, int], m: int) -> float:
    return key[0] + key[1] / (m + 1.0)


def _reverse_delta_sum(prob: OrderProblem, pos: list[int], inv: list[int], lo: int, hi: int) -> int:
    seg = inv[lo:hi + 1]
    inside = set(seg)
    d = 0
    for a in seg:
        pa = pos[a]
        na = lo + hi - pa
        for w, M, _ in prob.adj[a]:
            pw = pos[w]
            if w in inside:
                if a < w:
                    d += M[na][lo + hi - pw] - M[pa][pw]
            else:
                d += M[na][pw] - M[pa][pw]
        if prob.flag[a]:
            d += prob.num[na] - prob.num[pa]
    return d


def _apply_reverse(pos: list[int], inv: list[int], lo: int, hi: int) -> None:
    seg = inv[lo:hi + 1]
    seg.reverse()
    inv[lo:hi + 1] = seg
    for p in range(lo, hi + 1):
        pos[inv[p]] = p


def _sample_temperature(prob: OrderProblem, pos: list[int], rng: random.Random, energy_delta) -> float:
    deltas = []
    n = prob.n
    for _ in range(min(200, 10 * n)):
        a = rng.randrange(n)
        b = rng.randrange(n - 1)
        b += b >= a
        d = energy_delta(a, b)
        if d > 0:
            deltas.append(d)
    if not deltas:
        return 1.0
    deltas.sort()
    return max(deltas[len(deltas) // 2], 1e-3)


def _descend_sum(prob: OrderProblem, pos: list[int], inv: list[int], cur: int) -> int:
    n = prob.n
    improved = True
    while improved:
        improved = False
        for a in range(n):
            best_d, best_b = 0, -1
            for b in range(n):
                if b == a:
                    continue
                d = prob.swap_delta(pos, a, b)
                if d < best_d:
                    best_d, best_b = d, b
            if best_b >= 0:
                pa, pb = pos[a], pos[best_b]
                pos[a], pos[best_b] = pb, pa
                inv[pa], inv[pb] = best_b, a
                cur += best_d
                improved = True
    return cur


def _descend_max(prob: OrderProblem, pos: list[int], inv: list[int], st: _MaxState) -> None:
    n = prob.n
    improved = True
    while improved:
        improved = False
        for a in range(n):
            for b in range(a + 1, n):
                before = st.energy()
                pa, pb = pos[a], pos[b]
                pos[a], pos[b] = pb, pa
                undo = st.update(st.affected((a, b)), pos)
                if st.energy() < before:
                    inv[pa], inv[pb] = b, a
                    improved = True
                else:
                    pos[a], pos[b] = pa, pb
                    st.revert(undo)


def _run_restart(prob: OrderProblem, params: SearchParams, index: int, deadline: float | None) -> OrderResult:
    t0 = time.perf_counter()
    rng = random.Random(params.seed + index)
    n = prob.n
    pos = _initial_order(prob, index, rng)
    inv = [0] * n
    for v, p in enumerate(pos):
        inv[p] = v
    iters = params.iterations if params.iterations is not None else 4000 * n
    use_reverse = params.neighborhood == "swap+reverse" and n > 2
    max_seg = max(2, n // 4)
    partial = False
    done = 0
    if n < 2 or iters <= 0:
        key = prob.key(pos)
        return OrderResult(tuple(pos), key[0], False, 0, time.perf_counter() - t0, index, key[1])

    if prob.is_sum:
        cur = prob.value(pos)
        best, best_pos = cur, list(pos)
        T = params.initial_temperature or _sample_temperature(prob, pos, rng, lambda a, b: prob.swap_delta(pos, a, b))
        sweeps = max(1, iters // n)
        alpha = params.cooling_rate or (1e-3) ** (1.0 / sweeps)
        for sweep in range(sweeps):
            if deadline is not None and time.perf_counter() > deadline:
                partial = True
                break
            for _ in range(n):
                if use_reverse and rng.random() < 0.2:
                    lo = rng.randrange(n - 1)
                    hi = min(n - 1, lo + 1 + rng.randrange(max_seg))
                    d = _reverse_delta_sum(prob, pos, inv, lo, hi)
                    if d <= 0 or rng.random() < math.exp(-d / T):
                        _apply_reverse(pos, inv, lo, hi)
                        cur += d
                else:
                    a = rng.randrange(n)
                    if rng.random() < 0.5:
                        pb = pos[a] + rng.choice((-1, 1)) * (1 + rng.randrange(max_seg))
                        if not 0 <= pb < n:
                            continue
                        b = inv[pb]
                    else:
                        b = rng.randrange(n - 1)
                        b += b >= a
                    d = prob.swap_delta(pos, a, b)
                    if d <= 0 or rng.random() < math.exp(-d / T):
                        pa, pb = pos[a], pos[b]
                        pos[a], pos[b] = pb, pa
                        inv[pa], inv[pb] = b, a
                        cur += d
                if cur < best:
                    best, best_pos = cur, list(pos)
            done += n
            T *= alpha
        pos = best_pos
        for v, p in enumerate(pos):
            inv[p] = v
        _descend_sum(prob, pos, inv, best)
        key = prob.key(pos)
    else:
        st = _MaxState(prob, pos)
        m = prob.m + n
        best_key, best_pos = st.energy(), list(pos)

        def trial_swap(a, b):
            before = _scalar(st.energy(), m)
            pa, pb = pos[a], pos[b]
            pos[a], pos[b] = pb, pa
            undo = st.update(st.affected((a, b)), pos)
            d = _scalar(st.energy(), m) - before
            pos[a], pos[b] = pa, pb
            st.revert(undo)
            return d

        T = params.initial_temperature or _sample_temperature(prob, pos, rng, trial_swap)
        sweeps = max(1, iters // n)
        alpha = params.cooling_rate or (1e-3) ** (1.0 / sweeps)
        for sweep in range(sweeps):
            if deadline is not None and time.perf_counter() > deadline:
                partial = True
                break
            for _ in range(n):
                before = st.energy()
                if use_reverse and rng.random() < 0.2:
                    lo = rng.randrange(n - 1)
                    hi = min(n - 1, lo + 1 + rng.randrange(max_seg))
                    verts = inv[lo:hi + 1]
                    _apply_reverse(pos, inv, lo, hi)
                    undo = st.update(st.affected(verts), pos)
                    d = _scalar(st.energy(), m) - _scalar(before, m)
                    if not (d <= 0 or rng.random() < math.exp(-d / T)):
                        _apply_reverse(pos, inv, lo, hi)
                        st.revert(undo)
                else:
                    a = rng.randrange(n)
                    b = rng.randrange(n - 1)
                    b += b >= a
                    pa, pb = pos[a], pos[b]
                    pos[a], pos[b] = pb, pa
                    undo = st.update(st.affected((a, b)), pos)
                    d = _scalar(st.energy(), m) - _scalar(before, m)
                    if d <= 0 or rng.random() < math.exp(-d / T):
                        inv[pa], inv[pb] = b, a
                    else:
                        pos[a], pos[b] = pa, pb
                        st.revert(undo)
                if st.energy() < best_key:
                    best_key, best_pos = st.energy(), list(pos)
            done += n
            T *= alpha
        pos = best_pos
        for v, p in enumerate(pos):
            inv[p] = v
        st = _MaxState(prob, pos)
        _descend_max(prob, pos, inv, st)
        key = prob.key(pos)
    return OrderResult(tuple(pos), key[0], False, done, time.perf_counter() - t0, index, key[1], partial)


def greedy_order(cc: CostComponents, graph: HamiltonianGraph) -> OrderResult:
    """Best of the identity and breadth-first orders, without search."""
    prob = OrderProblem(cc, graph)
    cands = [tuple(range(graph.n)), bfs_order(graph)]
    keys = [prob.key(s) for s in cands]
    k = min(range(len(cands)), key=lambda k: (keys[k], k))
    return OrderResult(cands[k], keys[k][0], False, 0, 0.0, k, keys[k][1])


def _restart_job(args):
    cc, graph, params, index, deadline = args
    return _run_restart(OrderProblem(cc, graph), params, index, deadline)


def optimize_order(cc: CostComponents, graph: HamiltonianGraph, params: SearchParams | None = None) -> OrderResult:
    """Multi-start annealing; deterministic for fixed ``params`` unless the time limit cuts in.

    Restart ``k`` uses ``random.Random(seed + k)``; starts are the identity
    (k=0), a breadth-first order from a pseudo-peripheral vertex (k=1) and
    random orders. The winner has the lowest ``(value, count at max)``, then
    the lowest restart index.
    """
    params = params or SearchParams()
    t0 = time.perf_counter()
    if params.time_limit is not None and params.time_limit <= 0:
        res = greedy_order(cc, graph)
        return OrderResult(res.order, res.value, False, 0, time.perf_counter() - t0, res.restart, res.count_at_max, True)
    deadline = None if params.time_limit is None else t0 + params.time_limit
    if params.workers > 1 and params.restarts > 1:
        jobs = [(cc, graph, params, k, deadline) for k in range(params.restarts)]
        with ProcessPoolExecutor(max_workers=params.workers) as pool:
            results = list(pool.map(_restart_job, jobs))
    else:
        prob = OrderProblem(cc, graph)
        results = [_run_restart(prob, params, k, deadline) for k in range(params.restarts)]
    best = min(results, key=lambda r: (r.value, r.count_at_max, r.restart))
    check = objective(cc, graph, best.order)
    if check != best.value:
        raise AssertionError(f"incremental value {best.value} disagrees with recomputation {check}")
    return OrderResult(
        best.order,
        best.value,
        False,
        sum(r.iterations for r in results),
        time.perf_counter() - t0,
        best.restart,
        best.count_at_max,
        any(r.partial for r in results),
    )
