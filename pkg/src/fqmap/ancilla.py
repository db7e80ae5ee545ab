"""Ancilla qubits that cancel Jordan-Wigner Z strings.

Ancilla ``k`` comes with a qubit subset ``I_k`` and the stabilizer
``Z_{I_k} Z_{n+k}``. Every hopping term between positions ``i < j`` either

* Option 1: is multiplied by ``Z_{I_k}`` and gets ``Y`` (odd overlap of
  ``{i, j}`` with ``I_k``) or ``Z`` on the ancilla, changing its weight by
  ``d = |I_k outside [i, j]| - |I_k strictly inside| + 1``; or
* Option 2: only gets ``X`` on the ancilla when the overlap is odd, changing
  its weight by the overlap parity.

The cheaper option is used per term (ties keep Option 2). Subsets are
pairwise disjoint, which makes the weight changes of different ancillas add.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .bitmat import mask_of
from .encodings import EncodingKind
from .graphs import HamiltonianGraph, check_order
from .pauli import Hamiltonian, PauliString, WeightedTerm, commutes, mul

OPTION_CANCEL = 1
OPTION_IDLE = 2


class DisjointnessViolation(ValueError):
    pass


@dataclass(frozen=True)
class AncillaPlan:
    n: int
    subsets: tuple[frozenset, ...] = ()

    def __post_init__(self):
        cleaned = []
        used: set[int] = set()
        for s in self.subsets:
            s = frozenset(int(q) for q in s)
            if not s:
                continue
            bad = [q for q in s if not 0 <= q < self.n]
            if bad:
                raise ValueError(f"qubits {sorted(bad)} outside range({self.n})")
            if used & s:
                raise DisjointnessViolation(f"qubits {sorted(used & s)} appear in more than one subset")
            used |= s
            cleaned.append(s)
        object.__setattr__(self, "subsets", tuple(cleaned))

    @property
    def p(self) -> int:
        return len(self.subsets)

    def masks(self) -> list[int]:
        return [mask_of(s) for s in self.subsets]

    def to_dict(self) -> dict:
        return {"n": self.n, "subsets": [sorted(s) for s in self.subsets]}

    @classmethod
    def from_dict(cls, data: dict) -> "AncillaPlan":
        if "n" not in data:
            raise ValueError("plan is missing the 'n' field")
        return cls(int(data["n"]), tuple(frozenset(s) for s in data.get("subsets", [])))


# cost prediction -------------------------------------------------------------


def delta(i: int, j: int, subset: Iterable[int], n: int | None = None) -> int:
    """Signed weight change of Option 1 on the ``(i, j)`` hopping strings."""
    if i >= j:
        raise ValueError(f"need i < j, got ({i}, {j})")
    outside = inside = 0
    for q in subset:
        if n is not None and not 0 <= q < n:
            raise ValueError(f"qubit {q} outside range({n})")
        if q < i or q > j:
            outside += 1
        elif i < q < j:
            inside += 1
    return outside - inside + 1


def overlap_parity(i: int, j: int, subset: Iterable[int]) -> int:
    s = set(subset)
    return ((i in s) + (j in s)) % 2


def option_for(i: int, j: int, subset: Iterable[int]) -> int:
    subset = list(subset)
    return OPTION_CANCEL if delta(i, j, subset) < overlap_parity(i, j, subset) else OPTION_IDLE


def edge_increase(i: int, j: int, subset: Iterable[int], alpha: int) -> int:
    """``alpha * min(parity, d)`` for one edge and one ancilla."""
    if alpha not in (0, 2, 4):
        raise ValueError(f"alpha must be 0, 2 or 4, got {alpha}")
    subset = list(subset)
    return alpha * min(overlap_parity(i, j, subset), delta(i, j, subset))


def hopping_alpha(edge) -> int:
    """Number of hopping strings an edge contributes (2 or 4; 0 without hopping)."""
    if not edge.hopping:
        return 0
    return 4 if edge.coeff == "complex" else 2


def hopping_edges(graph: HamiltonianGraph, order: Sequence[int] | None = None) -> list[tuple[int, int, int]]:
    """``(i, j, alpha)`` with ``i < j`` positions for every hopping edge."""
    sigma = check_order(order, graph.n)
    out = []
    for e in graph.edges:
        a = hopping_alpha(e)
        if a:
            i, j = sorted((sigma[e.u], sigma[e.v]))
            out.append((i, j, a))
    return out


def plan_objective(graph: HamiltonianGraph, order: Sequence[int] | None, plan: AncillaPlan) -> int:
    if plan.n != graph.n:
        raise ValueError(f"plan is for {plan.n} qubits, graph has {graph.n} vertices")
    edges = hopping_edges(graph, order)
    return sum(edge_increase(i, j, s, a) for s in plan.subsets for i, j, a in edges)


@dataclass(frozen=True)
class EdgeChoice:
    i: int
    j: int
    options: tuple[int, ...]  # one per ancilla


def edge_choices(graph: HamiltonianGraph, order: Sequence[int] | None, plan: AncillaPlan) -> list[EdgeChoice]:
    """Option used by each hopping edge (by positions) for each ancilla."""
    return [EdgeChoice(i, j, tuple(option_for(i, j, s) for s in plan.subsets)) for i, j, _ in hopping_edges(graph, order)]


# explicit construction ------------------------------------------------------


def stabilizer_generators(plan: AncillaPlan) -> list[PauliString]:
    width = plan.n + plan.p
    return [PauliString.z_on(width, m | (1 << (plan.n + k))) for k, m in enumerate(plan.masks())]


def apply_plan(ham: Hamiltonian, plan: AncillaPlan) -> Hamiltonian:
    """Extend a Jordan-Wigner Hamiltonian by the plan's ancillas.

    Hopping terms (``kind == "hop"``, ``modes = (i, j)``) get ``X`` on
    ancilla ``k`` when their endpoints overlap ``I_k`` oddly and are
    multiplied by the stabilizer of ``k`` when Option 1 is cheaper. All other
    terms are padded with identities. Phases are folded into coefficients.
    """
    if ham.encoding is not EncodingKind.JORDAN_WIGNER:
        raise ValueError("ancilla plans apply only to Jordan-Wigner Hamiltonians")
    if ham.ancillas:
        raise ValueError("Hamiltonian already carries ancillas")
    if plan.n != ham.width:
        raise ValueError(f"plan is for {plan.n} qubits, Hamiltonian has {ham.width}")
    width = plan.n + plan.p
    stabs = stabilizer_generators(plan)
    subsets = [sorted(s) for s in plan.subsets]
    out = []
    for t in ham.terms:
        op = t.op.extend(width)
        if t.kind == "hop":
            i, j = t.modes
            for k, s in enumerate(subsets):
                par = overlap_parity(i, j, s)
                if par:
                    op = mul(op, PauliString.x_on(width, 1 << (plan.n + k)))
                if delta(i, j, s) < par:
                    op = mul(op, stabs[k])
        coeff = t.coeff * 1j ** op.phase
        out.append(WeightedTerm(coeff, op.without_phase(), t.kind, t.modes))
    return Hamiltonian(width, tuple(out), ham.encoding, plan.p)


@dataclass(frozen=True)
class EquivalenceReport:
    passed: bool
    witness: tuple[int, ...] = ()
    reason: str = ""

    def __bool__(self) -> bool:
        return self.passed


def _hermiticity(t: WeightedTerm, tol: float = 1e-12) -> str:
    c = t.coeff * 1j ** t.op.phase
    if abs(c.imag) <= tol:
        return "hermitian"
    if abs(c.real) <= tol:
        return "anti-hermitian"
    return "mixed"


def _commutation_matrix(ops: Sequence[PauliString]) -> np.ndarray:
    w = ops[0].width if ops else 0
    X = np.zeros((len(ops), w), dtype=np.int64)
    Z = np.zeros((len(ops), w), dtype=np.int64)
    for r, op in enumerate(ops):
        for q in range(w):
            X[r, q] = (op.x >> q) & 1
            Z[r, q] = (op.z >> q) & 1
    return (X @ Z.T + Z @ X.T) % 2


def verify_equivalence(original: Hamiltonian | Sequence[WeightedTerm], modified: Hamiltonian | Sequence[WeightedTerm]) -> EquivalenceReport:
    """Check that aligned terms share Hermiticity and pairwise commutation."""
    a = list(original)
    b = list(modified)
    if len(a) != len(b):
        raise ValueError(f"term lists are misaligned: {len(a)} vs {len(b)} terms")
    for k, (s, t) in enumerate(zip(a, b)):
        hs, ht = _hermiticity(s), _hermiticity(t)
        if hs != ht:
            return EquivalenceReport(False, (k,), f"term {k} is {hs} before and {ht} after")
    if not a:
        return EquivalenceReport(True)
    ca = _commutation_matrix([t.op for t in a])
    cb = _commutation_matrix([t.op for t in b])
    diff = np.argwhere(ca != cb)
    if len(diff):
        r, c = (int(x) for x in diff[0])
        r, c = min(r, c), max(r, c)
        before = "commute" if ca[r, c] == 0 else "anticommute"
        after = "commute" if cb[r, c] == 0 else "anticommute"
        return EquivalenceReport(False, (r, c), f"terms {r} and {c} {before} before but {after} after")
    return EquivalenceReport(True)


def stabilizers_commute(ham: Hamiltonian, plan: AncillaPlan) -> bool:
    stabs = stabilizer_generators(plan)
    return all(commutes(s, t.op) for s in stabs for t in ham.terms)


# optimization ---------------------------------------------------------------


@dataclass(frozen=True)
class PlanSearchParams:
    seed: int = 0
    kicks: int = 30  # perturbation rounds per subset
    kick_size: int = 3
    anneal_steps: int | None = None  # per budget; None means 2000 * n
    initial_temperature: float = 8.0


class _PlanModel:
    """Vectorized ``sum_e alpha_e min(parity_e, d_e)`` for indicator vectors."""

    def __init__(self, edges: Sequence[tuple[int, int, int]], n: int):
        self.n = n
        E = len(edges)
        self.A = np.zeros((E, n), dtype=np.int64)
        self.B = np.zeros((E, n), dtype=np.int64)
        self.alpha = np.array([a for _, _, a in edges], dtype=np.int64)
        for r, (i, j, _) in enumerate(edges):
            self.A[r, :i] = 1
            self.A[r, j + 1:] = 1
            self.A[r, i + 1:j] = -1
            self.B[r, i] = self.B[r, j] = 1

    def value(self, x: np.ndarray) -> int:
        d = self.A @ x + 1
        par = (self.B @ x) % 2
        return int((self.alpha * np.minimum(par, d)).sum())

    def toggles(self, x: np.ndarray) -> np.ndarray:
        """Objective after flipping each qubit's membership."""
        d = self.A @ x + 1
        par = (self.B @ x) % 2
        s = 1 - 2 * x
        d2 = d[:, None] + self.A * s[None, :]
        p2 = par[:, None] ^ self.B
        return (self.alpha[:, None] * np.minimum(p2, d2)).sum(axis=0)

    def interval_table(self) -> np.ndarray:
        """``V[lo, hi]``: objective of the subset holding positions ``lo..hi-1``."""
        n = self.n
        V = np.zeros((n + 1, n + 1), dtype=np.int64)
        if not len(self.alpha):
            return V
        zero = np.zeros((len(self.alpha), 1), dtype=np.int64)
        ca = np.concatenate([zero, np.cumsum(self.A, axis=1)], axis=1)
        cb = np.concatenate([zero, np.cumsum(self.B, axis=1)], axis=1)
        for lo in range(n):
            d = ca[:, lo + 1:] - ca[:, lo:lo + 1] + 1
            par = (cb[:, lo + 1:] - cb[:, lo:lo + 1]) % 2
            V[lo, lo + 1:] = (self.alpha[:, None] * np.minimum(par, d)).sum(axis=0)
        return V

    def best_interval(self, free: np.ndarray) -> tuple[int, np.ndarray]:
        """Best set of free qubits lying in one contiguous position range."""
        n = self.n
        if not free.any() or not len(self.alpha):
            return 0, np.zeros(n, dtype=np.int64)
        Af = self.A * free[None, :]
        Bf = self.B * free[None, :]
        ca = np.concatenate([np.zeros((len(self.alpha), 1), dtype=np.int64), np.cumsum(Af, axis=1)], axis=1)
        cb = np.concatenate([np.zeros((len(self.alpha), 1), dtype=np.int64), np.cumsum(Bf, axis=1)], axis=1)
        best_val, best = 0, (0, 0)
        for lo in range(n):
            if not free[lo]:
                continue
            d = ca[:, lo + 1:] - ca[:, lo:lo + 1] + 1
            par = (cb[:, lo + 1:] - cb[:, lo:lo + 1]) % 2
            vals = (self.alpha[:, None] * np.minimum(par, d)).sum(axis=0)
            k = int(np.argmin(vals))
            if vals[k] < best_val:
                best_val, best = int(vals[k]), (lo, lo + k + 1)
        x = np.zeros(n, dtype=np.int64)
        x[best[0]:best[1]] = 1
        return best_val, x * free


def _descend(model: _PlanModel, x: np.ndarray, free: np.ndarray, val: int) -> tuple[int, np.ndarray]:
    """Best-improvement toggles, then add/remove swaps, until stuck."""
    x = x.copy()
    while True:
        t = model.toggles(x)
        t = np.where(free.astype(bool), t, np.iinfo(np.int64).max)
        q = int(np.argmin(t))
        if t[q] < val:
            x[q] ^= 1
            val = int(t[q])
            continue
        # exchange one member for one free non-member
        best = (val, -1, -1)
        for q_out in np.flatnonzero(x):
            y = x.copy()
            y[q_out] = 0
            t2 = model.toggles(y)
            cand = np.where(free.astype(bool) & (y == 0), t2, np.iinfo(np.int64).max)
            cand[q_out] = np.iinfo(np.int64).max
            q_in = int(np.argmin(cand))
            if cand[q_in] < best[0]:
                best = (int(cand[q_in]), int(q_out), q_in)
        if best[1] < 0:
            return val, x
        x[best[1]] = 0
        x[best[2]] = 1
        val = best[0]


def _interval_partition(V: np.ndarray, p: int) -> list[np.ndarray]:
    """Optimal choice of at most ``p`` disjoint position ranges."""
    n = V.shape[0] - 1
    f = np.zeros((p + 1, n + 1), dtype=np.int64)
    cut = np.full((p + 1, n + 1), -1)
    for k in range(1, p + 1):
        for t in range(1, n + 1):
            f[k, t], cut[k, t] = f[k, t - 1], -1
            cand = f[k - 1, :t] + V[:t, t]
            lo = int(np.argmin(cand))
            if cand[lo] < f[k, t]:
                f[k, t], cut[k, t] = cand[lo], lo
    xs = []
    k, t = p, n
    while k > 0 and t > 0:
        lo = cut[k, t]
        if lo < 0:
            t -= 1
            continue
        x = np.zeros(n, dtype=np.int64)
        x[lo:t] = 1
        xs.append(x)
        k, t = k - 1, lo
    xs.reverse()
    return xs


def _optimize_subset(model: _PlanModel, free: np.ndarray, rng: np.random.Generator, params: PlanSearchParams) -> tuple[int, np.ndarray]:
    n = model.n
    starts = [np.zeros(n, dtype=np.int64)]
    ival, ix = model.best_interval(free)
    starts.append(ix)
    best_val, best_x = 0, starts[0]
    for x0 in starts:
        v, x = _descend(model, x0, free, model.value(x0))
        if v < best_val:
            best_val, best_x = v, x
    free_idx = np.flatnonzero(free)
    if len(free_idx) == 0:
        return best_val, best_x
    cur_val, cur_x = best_val, best_x
    for _ in range(params.kicks):
        y = cur_x.copy()
        flips = rng.choice(free_idx, size=min(params.kick_size, len(free_idx)), replace=False)
        y[flips] ^= 1
        v, y = _descend(model, y, free, model.value(y))
        if v <= cur_val:
            cur_val, cur_x = v, y
        if v < best_val:
            best_val, best_x = v, y
    return best_val, best_x


def _joint_search(model: _PlanModel, xs: list[np.ndarray], vals: list[int]) -> None:
    """Move single qubits between subsets (or out of all) while that helps."""
    n = model.n
    p = len(xs)
    while True:
        owner = np.full(n, -1)
        for k, x in enumerate(xs):
            owner[x.astype(bool)] = k
        tog = [model.toggles(x) - v for x, v in zip(xs, vals)]
        best = (0, -1, -1)
        for q in range(n):
            src = owner[q]
            rem = tog[src][q] if src >= 0 else 0
            if src >= 0 and rem < best[0]:
                best = (int(rem), q, -1)
            for k in range(p):
                if k == src:
                    continue
                gain = rem + tog[k][q]
                if gain < best[0]:
                    best = (int(gain), q, k)
        if best[1] < 0:
            return
        _, q, dst = best
        src = owner[q]
        if src >= 0:
            xs[src][q] = 0
            vals[src] = model.value(xs[src])
        if dst >= 0:
            xs[dst][q] = 1
            vals[dst] = model.value(xs[dst])


def _anneal(model: _PlanModel, xs: list[np.ndarray], vals: list[int], rng: np.random.Generator, steps: int, t0: float) -> None:
    """Anneal qubit labels (a subset index or none); keep the best state seen."""
    n, p = model.n, len(xs)
    if not p or not steps or not len(model.alpha):
        return
    AT, BT, al = model.A.T.copy(), model.B.T.copy(), model.alpha
    label = np.full(n, -1)
    for k, x in enumerate(xs):
        label[x.astype(bool)] = k
    d = [model.A @ x + 1 for x in xs]
    par = [(model.B @ x) % 2 for x in xs]
    cur_vals = list(vals)
    cur = best = sum(vals)
    best_label = label.copy()
    qs = rng.integers(n, size=steps)
    news = rng.integers(-1, p, size=steps)
    us = rng.random(steps)
    for s in range(steps):
        q, new = int(qs[s]), int(news[s])
        old = int(label[q])
        if new == old:
            continue
        temp = t0 * 1e-3 ** (s / steps)
        change = 0
        if old >= 0:
            d_old = d[old] - AT[q]
            p_old = par[old] ^ BT[q]
            v_old = int((al * np.minimum(p_old, d_old)).sum())
            change += v_old - cur_vals[old]
        if new >= 0:
            d_new = d[new] + AT[q]
            p_new = par[new] ^ BT[q]
            v_new = int((al * np.minimum(p_new, d_new)).sum())
            change += v_new - cur_vals[new]
        if change <= 0 or us[s] < np.exp(-change / temp):
            if old >= 0:
                d[old], par[old], cur_vals[old] = d_old, p_old, v_old
            if new >= 0:
                d[new], par[new], cur_vals[new] = d_new, p_new, v_new
            label[q] = new
            cur += change
            if cur < best:
                best, best_label = cur, label.copy()
    if best < sum(vals):
        for k in range(p):
            xs[k] = (best_label == k).astype(np.int64)
            vals[k] = model.value(xs[k])


def _prune(model: _PlanModel, xs: list[np.ndarray], vals: list[int]) -> None:
    """Drop members whose removal leaves the value unchanged."""
    for k, x in enumerate(xs):
        changed = True
        while changed:
            changed = False
            t = model.toggles(x)
            for q in np.flatnonzero(x):
                if t[q] <= vals[k]:
                    x[q] = 0
                    vals[k] = int(t[q])
                    changed = True
                    break


def _refine(model, xs, vals, rng, steps, params) -> None:
    _joint_search(model, xs, vals)
    _anneal(model, xs, vals, rng, steps, params.initial_temperature)
    _joint_search(model, xs, vals)
    _prune(model, xs, vals)


def sweep_plans(graph: HamiltonianGraph, order: Sequence[int] | None, p_max: int, params: PlanSearchParams | None = None) -> list[tuple[AncillaPlan, int]]:
    """Plans for every budget ``0..p_max``, each grown from the previous one.

    Ancilla ``k`` is optimized with earlier subsets fixed (best contiguous
    range of free qubits, then toggle/exchange descent with random kicks),
    after which single qubits move between subsets while that helps and
    the joint labelling is annealed. A second candidate starts from the best
    ``p`` disjoint position ranges and gets the same joint refinement; the
    better of the two is kept, so values are non-increasing in the budget.
    """
    params = params or PlanSearchParams()
    n = graph.n
    model = _PlanModel(hopping_edges(graph, order), n)
    rng = np.random.default_rng(params.seed)
    steps = 2000 * n if params.anneal_steps is None else params.anneal_steps
    table = model.interval_table()
    xs: list[np.ndarray] = []
    vals: list[int] = []
    out = [(AncillaPlan(n), 0)]
    for _ in range(p_max):
        used = np.zeros(n, dtype=np.int64)
        for x in xs:
            used |= x
        v, x = _optimize_subset(model, 1 - used, rng, params)
        xs.append(x)
        vals.append(v)
        _refine(model, xs, vals, rng, steps, params)
        seed_xs = _interval_partition(table, len(xs))
        seed_xs += [np.zeros(n, dtype=np.int64) for _ in range(len(xs) - len(seed_xs))]
        seed_vals = [model.value(x) for x in seed_xs]
        _refine(model, seed_xs, seed_vals, rng, steps, params)
        if sum(seed_vals) < sum(vals):
            xs, vals = seed_xs, seed_vals
        plan = AncillaPlan(n, tuple(frozenset(np.flatnonzero(x).tolist()) for x in xs))
        total = sum(vals)
        if total > out[-1][1]:
            raise AssertionError("plan search increased the objective")
        out.append((plan, total))
    return out


def optimize_plan(graph: HamiltonianGraph, order: Sequence[int] | None, p: int, params: PlanSearchParams | None = None) -> tuple[AncillaPlan, int]:
    if p < 0:
        raise ValueError("ancilla budget must be non-negative")
    plan, value = sweep_plans(graph, order, p, params)[-1]
    check = plan_objective(graph, order, plan)
    if check != value:
        raise AssertionError(f"search value {value} disagrees with recomputation {check}")
    return plan, value


def brute_force_plan(graph: HamiltonianGraph, order: Sequence[int] | None, p: int, max_states: int = 20_000_000, chunk: int = 1 << 16) -> tuple[AncillaPlan, int]:
    """Exact optimum over all assignments of qubits to ``p`` subsets or none."""
    n = graph.n
    states = (p + 1) ** n
    if states > max_states:
        raise ValueError(f"{states} assignments exceed the brute-force limit")
    model = _PlanModel(hopping_edges(graph, order), n)
    powers = (p + 1) ** np.arange(n, dtype=np.int64)
    best_val, best_assign = 0, np.zeros(n, dtype=np.int64)
    for lo in range(0, states, chunk):
        idx = np.arange(lo, min(lo + chunk, states), dtype=np.int64)
        labels = (idx[:, None] // powers[None, :]) % (p + 1)
        total = np.zeros(len(idx), dtype=np.int64)
        for k in range(1, p + 1):
            X = (labels == k).astype(np.int64)
            d = X @ model.A.T + 1
            par = (X @ model.B.T) % 2
            total += (model.alpha[None, :] * np.minimum(par, d)).sum(axis=1)
        r = int(np.argmin(total))
        if total[r] < best_val:
            best_val, best_assign = int(total[r]), labels[r]
    subsets = tuple(frozenset(q for q in range(n) if best_assign[q] == k) for k in range(1, p + 1))
    return AncillaPlan(n, subsets), best_val
