import itertools
import random
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fqmap.ancilla import (
    OPTION_CANCEL,
    OPTION_IDLE,
    AncillaPlan,
    DisjointnessViolation,
    PlanSearchParams,
    apply_plan,
    brute_force_plan,
    delta,
    edge_choices,
    edge_increase,
    hopping_alpha,
    optimize_plan,
    plan_objective,
    stabilizer_generators,
    stabilizers_commute,
    sweep_plans,
    verify_equivalence,
)
from fqmap.cost import jw_hopping_closed_form
from fqmap.encodings import build_encoding
from fqmap.graphs import Edge, HamiltonianGraph, apply_model, cycle, grid, random_graph
from fqmap.pauli import Hamiltonian, PauliString, WeightedTerm, assemble_hamiltonian, commutes
from oracles import dense_terms


def single_edge(n=4, u=0, v=3, coeff="real"):
    return HamiltonianGraph(n, (Edge(u, v, coeff=coeff, interaction=False),), (False,) * n)


def z_count_change(i, j, subset):
    """Weight change of one JW (i, j) string under Z_subset, counted qubit by qubit."""
    change = 0
    for q in subset:
        if q in (i, j):
            continue
        change += -1 if i < q < j else 1
    return change + 1


def random_plan(n, p, rng):
    labels = [rng.randrange(-1, p) for _ in range(n)]
    return AncillaPlan(n, tuple(frozenset(q for q in range(n) if labels[q] == k) for k in range(p)))


# prediction -------------------------------------------------------------------


def test_delta_examples():
    assert delta(2, 7, set()) == 1
    assert delta(2, 7, {3, 4, 5}) == -2
    assert delta(2, 7, {2, 3, 4}) == -1
    with pytest.raises(ValueError):
        delta(7, 2, {3})
    with pytest.raises(ValueError):
        delta(1, 1, {3})


def test_edge_increase_examples():
    assert edge_increase(2, 7, {3, 4, 5}, 4) == -8
    assert edge_increase(2, 7, {0, 8, 9}, 2) == 0
    assert edge_increase(2, 7, {2, 3, 4}, 2) == -2
    with pytest.raises(ValueError):
        edge_increase(2, 7, {3}, 3)


def test_alpha_by_class():
    assert hopping_alpha(Edge(0, 1, coeff="complex")) == 4
    assert hopping_alpha(Edge(0, 1, coeff="real")) == 2
    assert hopping_alpha(Edge(0, 1, coeff="imag")) == 2
    assert hopping_alpha(Edge(0, 1, hopping=False)) == 0


def test_plan_objective_examples():
    g = single_edge()
    assert plan_objective(g, None, AncillaPlan(4)) == 0
    assert plan_objective(g, None, AncillaPlan(4, (frozenset({1, 2}),))) == -2
    long_edge = single_edge(10, 0, 9)
    two = AncillaPlan(10, (frozenset({1, 2, 3}), frozenset({5, 6, 7})))
    assert plan_objective(long_edge, None, two) == 2 * delta(0, 9, {1, 2, 3}) + 2 * delta(0, 9, {5, 6, 7})


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 14).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n - 2), st.data())))
def test_delta_matches_qubit_count(args):
    n, i, data = args
    j = data.draw(st.integers(i + 1, n - 1))
    subset = data.draw(st.sets(st.integers(0, n - 1)))
    assert delta(i, j, subset, n) == z_count_change(i, j, subset)


def test_plan_validation():
    with pytest.raises(DisjointnessViolation):
        AncillaPlan(5, (frozenset({0, 1}), frozenset({1, 2})))
    with pytest.raises(ValueError):
        AncillaPlan(3, (frozenset({3}),))
    plan = AncillaPlan(5, (frozenset(), frozenset({2})))
    assert plan.p == 1 and plan.subsets == (frozenset({2}),)
    assert AncillaPlan.from_dict(plan.to_dict()) == plan


def test_edge_choices_attain_minimum():
    g = apply_model(grid(3, 4), "hopping")
    plan = AncillaPlan(12, (frozenset({1, 2, 5}), frozenset({7, 8})))
    for ch in edge_choices(g, None, plan):
        for k, opt in enumerate(ch.options):
            s = plan.subsets[k]
            par = len({ch.i, ch.j} & s) % 2
            cost = delta(ch.i, ch.j, s) if opt == OPTION_CANCEL else par
            assert cost == min(par, delta(ch.i, ch.j, s))
            if par == delta(ch.i, ch.j, s):
                assert opt == OPTION_IDLE


# construction ----------------------------------------------------------------------


def test_apply_plan_single_edge():
    g = single_edge()
    ham = assemble_hamiltonian(g, build_encoding("jw", 4))
    plan = AncillaPlan(4, (frozenset({1, 2}),))
    out = apply_plan(ham, plan)
    assert out.width == 5 and out.ancillas == 1
    labels = {t.op.label() for t in out}
    assert labels == {"X0 X3 Z4", "Y0 Y3 Z4"}
    assert all(t.weight == 3 for t in out)


def test_option_two_adds_x():
    g = single_edge(6, 1, 2)
    ham = assemble_hamiltonian(g, build_encoding("jw", 6))
    out = apply_plan(ham, AncillaPlan(6, (frozenset({2, 4, 5}),)))
    for before, after in zip(ham, out):
        assert after.weight == before.weight + 1
        assert after.op.letter(6) == "X"


def test_empty_plan_only_widens():
    ham = assemble_hamiltonian(apply_model(grid(2, 2), "full"), build_encoding("jw", 4))
    out = apply_plan(ham, AncillaPlan(4))
    assert out.width == 4
    assert [(t.coeff, t.op) for t in out] == [(t.coeff, t.op) for t in ham]
    assert verify_equivalence(ham, out)


def test_apply_plan_rejects_other_encodings():
    ham = assemble_hamiltonian(single_edge(), build_encoding("bk", 4))
    with pytest.raises(ValueError):
        apply_plan(ham, AncillaPlan(4, (frozenset({1}),)))


def test_stabilizers():
    assert [s.label() for s in stabilizer_generators(AncillaPlan(4, (frozenset({1, 2}),)))] == ["Z1 Z2 Z4"]
    assert stabilizer_generators(AncillaPlan(4)) == []
    a, b = stabilizer_generators(AncillaPlan(6, (frozenset({0, 1}), frozenset({3}))))
    assert commutes(a, b)


def test_modified_hamiltonian_acts_like_original_on_code_space():
    g = apply_model(cycle(4), "full")
    ham = assemble_hamiltonian(g, build_encoding("jw", 4))
    plan = AncillaPlan(4, (frozenset({0, 1, 2}),))
    out = apply_plan(ham, plan)
    (stab,) = stabilizer_generators(plan)
    proj = (np.eye(32) + dense_terms([WeightedTerm(1, stab)])) / 2
    # code space basis: |f> on data qubits with the ancilla set to the parity of f on the subset
    basis = []
    for f in range(16):
        anc = bin(f & 0b0111).count("1") % 2
        vec = np.zeros(32)
        vec[f | (anc << 4)] = 1
        basis.append(vec)
    V = np.array(basis).T
    assert np.allclose(proj @ V, V)
    for a, b in zip(ham, out):
        assert np.allclose(V.T @ dense_terms([b]) @ V, dense_terms([a]))


def test_fault_injection_is_detected():
    g = apply_model(cycle(4), "hopping")
    ham = assemble_hamiltonian(g, build_encoding("jw", 4))
    plan = AncillaPlan(4, (frozenset({0, 1, 2}),))
    out = apply_plan(ham, plan)
    assert verify_equivalence(ham, out)
    k = next(k for k, t in enumerate(out) if t.op.letter(4) == "Y")
    bad_op = PauliString(out.width, out[k].op.x & ~(1 << 4), out[k].op.z, out[k].op.phase)
    assert bad_op.letter(4) == "Z"
    corrupted = list(out.terms)
    corrupted[k] = replace(out[k], op=bad_op)
    report = verify_equivalence(ham, Hamiltonian(out.width, tuple(corrupted), out.encoding, out.ancillas))
    assert not report and k in report.witness and len(report.witness) == 2


def test_hermiticity_change_is_detected():
    ham = assemble_hamiltonian(single_edge(), build_encoding("jw", 4))
    terms = list(ham.terms)
    terms[0] = replace(terms[0], coeff=terms[0].coeff * 1j)
    report = verify_equivalence(ham, terms)
    assert not report and report.witness == (0,)


def test_misaligned_lists():
    ham = assemble_hamiltonian(single_edge(), build_encoding("jw", 4))
    with pytest.raises(ValueError):
        verify_equivalence(ham, list(ham)[:-1])


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 4), st.integers(2, 5), st.integers(0, 3), st.integers(0, 10_000))
def test_predictor_matches_constructor(rows, cols, p, seed):
    rng = random.Random(seed)
    n = rows * cols
    g = apply_model(grid(rows, cols), rng.choice(["full", "hopping", "fermi-hubbard"]))
    order = list(range(n))
    rng.shuffle(order)
    plan = random_plan(n, p, rng)
    ham = assemble_hamiltonian(g, build_encoding("jw", n), order)
    out = apply_plan(ham, plan)
    for before, after in zip(ham, out):
        expect = 0
        if before.kind == "hop":
            i, j = before.modes
            expect = sum(min(len({i, j} & s) % 2, delta(i, j, s)) for s in plan.subsets)
        assert after.weight - before.weight == expect
    assert out.total_weight(["hop"]) - ham.total_weight(["hop"]) == plan_objective(g, order, plan)
    assert verify_equivalence(ham, out)
    assert stabilizers_commute(out, plan)


# optimization ---------------------------------------------------------------------------


def test_budget_zero():
    plan, value = optimize_plan(apply_model(grid(3, 3), "hopping"), None, 0)
    assert plan.p == 0 and value == 0


def test_single_edge_optimum():
    plan, value = optimize_plan(single_edge(), None, 1)
    assert value == -2 and plan.subsets == (frozenset({1, 2}),)
    assert brute_force_plan(single_edge(), None, 1) == (plan, value)


def test_brute_force_limit():
    with pytest.raises(ValueError):
        brute_force_plan(apply_model(grid(4, 5), "hopping"), None, 2)


@pytest.mark.parametrize("seed", range(6))
def test_search_matches_brute_force(seed):
    n = 9 + seed % 3
    g = apply_model(random_graph(n, 0.35, seed=seed), "hopping")
    for p in (1, 2):
        _, exact = brute_force_plan(g, None, p)
        plan, value = optimize_plan(g, None, p, PlanSearchParams(seed=seed))
        assert value >= exact
        assert value == exact
        assert plan_objective(g, None, plan) == value


def test_sweep_is_monotone_and_valid():
    g = apply_model(grid(5, 5), "hopping")
    sweep = sweep_plans(g, None, 6, PlanSearchParams(seed=2, anneal_steps=5000))
    values = [v for _, v in sweep]
    assert values[0] == 0
    assert all(b <= a for a, b in zip(values, values[1:]))
    for plan, value in sweep:
        assert plan.p <= 6
        for a, b in itertools.combinations(plan.subsets, 2):
            assert not a & b
        assert plan_objective(g, None, plan) == value
    base = jw_hopping_closed_form(g)
    plan, value = sweep[-1]
    ham = assemble_hamiltonian(g, build_encoding("jw", 25))
    out = apply_plan(ham, plan)
    assert out.total_weight(["hop"]) == base + value
    assert verify_equivalence(ham, out)


def test_sweep_is_seeded():
    g = apply_model(random_graph(14, 0.3, seed=4), "hopping")
    a = sweep_plans(g, None, 3, PlanSearchParams(seed=9, anneal_steps=3000))
    b = sweep_plans(g, None, 3, PlanSearchParams(seed=9, anneal_steps=3000))
    assert a == b
